#![allow(dead_code)]

#[path = "../../../core/tests/props/mod.rs"]
pub mod props;

use jetforge::dsl::{parse::parse_expr, print};
use jetforge::eval::{Evaluator, Kernel};
use jetforge::workspace::Workspace;
use jetforge_core::{normalize, Context, KernelError};
use proptest::test_runner::{Config, TestCaseError, TestRunner};

/// Printing a normalized expression and reading it back gives the same expression.
pub fn parse_print_roundtrip(cases: u32) -> Result<(), String> {
    let ws = Workspace::load_str("<roundtrip>", "symbol u;").map_err(|d| d.to_string())?;
    let ctx = Context::new();
    let backend = Kernel { ctx: &ctx };
    let mut runner = TestRunner::new(Config { cases, max_global_rejects: cases * 20, failure_persistence: None, ..Config::default() });
    runner
        .run(&props::rational_over(props::low_jets()), |e| {
            let r = match normalize(&e) {
                Ok(r) => r,
                Err(KernelError::DivisionByZero) => return Err(TestCaseError::reject("division by zero")),
                Err(err) => return Err(TestCaseError::fail(err.to_string())),
            };
            let text = print::ratexpr(&r);
            let ast = parse_expr(&text).map_err(|d| TestCaseError::fail(format!("{text}: {d}")))?;
            let back = Evaluator::new(&ws, &backend)
                .scalar_in("<roundtrip>", &ast)
                .map_err(|d| TestCaseError::fail(format!("{text}: {d}")))?;
            if !back.equals(&r) {
                return Err(TestCaseError::fail(format!("{text} reads back as {}", print::ratexpr(&back))));
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}
