//! Property suites for the kernel. Each returns the shrunk counterexample on failure,
//! so they can run both as ordinary tests and inside the acceptance report.

#![allow(dead_code)]

use std::collections::BTreeMap;

use jetforge_core::forms::{exterior_d, wedge, Differential, Form};
use jetforge_core::oracle::{eval_exact, eval_rat, SamplePoint};
use jetforge_core::{normalize, to_raw, Context, Direction, Equation, Expr, JetVar, KernelError, RatExpr, Symbol};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

pub const CASES: u32 = 1000;

pub fn sym(s: &str) -> Symbol {
    Symbol::new(s).unwrap()
}

pub fn jet(s: &str, ord: [u8; 3]) -> JetVar {
    JetVar::new(sym(s), ord)
}

/// Jets of `u` up to order two, all internal for the rmmdKP equation.
pub fn low_jets() -> Vec<JetVar> {
    [[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1], [0, 2, 0], [1, 1, 0], [0, 1, 1]]
        .into_iter()
        .map(|o| jet("u", o))
        .collect()
}

pub fn raw_pow(v: JetVar, a: i64, b: i64) -> Expr {
    Expr::pow(Expr::var(v), Expr::add(vec![Expr::int(a), Expr::mul(vec![Expr::int(b), Expr::kappa()])]))
}

/// E in u_yy = E for the rmmdKP equation, as an unnormalized tree.
pub fn rmmdkp_rhs() -> Expr {
    let [_, ut, ux, uy, uxx, utx, uxy] = low_jets()[..] else { unreachable!() };
    let k = Expr::kappa;
    let kp = |n: i64| Expr::add(vec![k(), Expr::int(n)]);
    let v = Expr::var;
    let coeff = Expr::add(vec![
        Expr::mul(vec![kp(1), Expr::pow(v(uy), Expr::int(2)), Expr::pow(v(ux), Expr::int(-2))]),
        Expr::neg(Expr::div(v(ut), v(ux))),
        Expr::mul(vec![k(), raw_pow(ux, 0, 1), v(uy)]),
        Expr::div(
            Expr::mul(vec![Expr::pow(kp(1), Expr::int(2)), raw_pow(ux, 2, 2)]),
            Expr::add(vec![Expr::mul(vec![Expr::int(2), k()]), Expr::int(3)]),
        ),
    ]);
    Expr::add(vec![
        v(utx),
        Expr::mul(vec![coeff, v(uxx)]),
        Expr::neg(Expr::mul(vec![k(), Expr::add(vec![Expr::div(v(uy), v(ux)), raw_pow(ux, 1, 1)]), v(uxy)])),
    ])
}

pub fn rmmdkp_excluded() -> Vec<BigRational> {
    vec![BigRational::from_integer((-2).into()), BigRational::new((-3).into(), 2.into()), BigRational::from_integer((-1).into())]
}

/// u_yy = E, built without the DSL.
pub fn rmmdkp() -> Equation {
    Equation::new("rmmdKP", jet("u", [0, 0, 2]), normalize(&rmmdkp_rhs()).unwrap(), rmmdkp_excluded()).unwrap()
}

/// Small raw trees over `vars`; powers of variables carry kappa-affine integer exponents.
pub fn expr_over(vars: Vec<JetVar>, depth: u32) -> BoxedStrategy<Expr> {
    let v2 = vars.clone();
    let leaf = prop_oneof![
        (-4i64..=4).prop_map(Expr::int),
        Just(Expr::kappa()),
        proptest::sample::select(vars.clone()).prop_map(Expr::var),
        (proptest::sample::select(v2), -2i64..=3, -1i64..=1).prop_map(|(v, a, b)| raw_pow(v, a, b)),
    ];
    leaf.prop_recursive(depth, 24, 3, |inner| {
        prop_oneof![
            proptest::collection::vec(inner.clone(), 2..4).prop_map(Expr::add),
            proptest::collection::vec(inner.clone(), 2..3).prop_map(Expr::mul),
            inner.clone().prop_map(Expr::neg),
            (inner.clone(), 0i64..=2).prop_map(|(a, n)| Expr::pow(a, Expr::int(n))),
        ]
    })
    .boxed()
}

/// Like `expr_over` but with occasional quotients.
pub fn rational_over(vars: Vec<JetVar>) -> BoxedStrategy<Expr> {
    let e = expr_over(vars, 2);
    prop_oneof![
        3 => e.clone(),
        1 => (e.clone(), e).prop_map(|(a, b)| Expr::div(a, b)),
    ]
    .boxed()
}

fn norm(e: &Expr) -> Result<RatExpr, TestCaseError> {
    match normalize(e) {
        Ok(r) => Ok(r),
        Err(KernelError::DivisionByZero) => Err(TestCaseError::reject("division by zero")),
        Err(err) => Err(TestCaseError::fail(format!("normalize failed: {err}"))),
    }
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config { cases, max_global_rejects: cases * 20, failure_persistence: None, ..Config::default() })
}

fn outcome<T: std::fmt::Debug>(r: Result<(), proptest::test_runner::TestError<T>>) -> Result<(), String> {
    r.map_err(|e| e.to_string())
}

fn same(a: &RatExpr, b: &RatExpr, what: &str) -> Result<(), TestCaseError> {
    if a.equals(b) {
        Ok(())
    } else {
        Err(TestCaseError::fail(format!("{what}: {a:?} != {b:?}")))
    }
}

pub fn normalize_idempotent(cases: u32) -> Result<(), String> {
    outcome(runner(cases).run(&rational_over(low_jets()), |e| {
        let once = norm(&e)?;
        let twice = norm(&to_raw(&once))?;
        prop_assert_eq!(&once, &twice);
        Ok(())
    }))
}

pub fn ring_laws(cases: u32) -> Result<(), String> {
    let s = (rational_over(low_jets()), rational_over(low_jets()), rational_over(low_jets()));
    outcome(runner(cases).run(&s, |(a, b, c)| {
        let (a, b, c) = (norm(&a)?, norm(&b)?, norm(&c)?);
        same(&a.add(&b), &b.add(&a), "a+b = b+a")?;
        same(&a.mul(&b), &b.mul(&a), "ab = ba")?;
        same(&a.add(&b).add(&c), &a.add(&b.add(&c)), "associativity of +")?;
        same(&a.mul(&b).mul(&c), &a.mul(&b.mul(&c)), "associativity of *")?;
        same(&a.mul(&b.add(&c)), &a.mul(&b).add(&a.mul(&c)), "distributivity")?;
        same(&a.mul(&RatExpr::one()), &a, "a*1 = a")?;
        prop_assert!(a.add(&a.neg()).is_zero(), "a + (-a) = 0");
        if !b.is_zero() {
            same(&a.mul(&b).div(&b).unwrap(), &a, "(ab)/b = a")?;
        }
        Ok(())
    }))
}

pub fn leibniz(cases: u32) -> Result<(), String> {
    let ctx = Context::new().with_base(&rmmdkp());
    let dirs = proptest::sample::select(Direction::ALL.to_vec());
    outcome(runner(cases).run(&(rational_over(low_jets()), rational_over(low_jets()), dirs), |(a, b, d)| {
        let (a, b) = (norm(&a)?, norm(&b)?);
        let lhs = ctx.total_derivative(&a.mul(&b), d).unwrap();
        let rhs = ctx
            .total_derivative(&a, d)
            .unwrap()
            .mul(&b)
            .add(&a.mul(&ctx.total_derivative(&b, d).unwrap()));
        same(&lhs, &rhs, "D(ab) = D(a) b + a D(b)")
    }))
}

/// D_a D_b f = D_b D_a f on the solution manifold, for polynomial f in low jets.
pub fn commutation(cases: u32) -> Result<(), String> {
    let ctx = Context::new().with_base(&rmmdkp());
    let pairs = proptest::sample::select(vec![
        (Direction::T, Direction::X),
        (Direction::T, Direction::Y),
        (Direction::X, Direction::Y),
    ]);
    outcome(runner(cases).run(&(expr_over(low_jets(), 2), pairs), |(e, (a, b))| {
        let f = norm(&e)?;
        let c = ctx.commutation_check(&f, a, b).unwrap();
        prop_assert!(c.is_zero(), "[D_{:?}, D_{:?}] f = {:?}", a, b, c);
        Ok(())
    }))
}

fn one_form() -> BoxedStrategy<Form> {
    let basis: Vec<Differential> = Direction::ALL
        .into_iter()
        .map(Differential::Coord)
        .chain(low_jets().into_iter().take(4).map(Differential::Jet))
        .collect();
    proptest::collection::vec((proptest::sample::select(basis), expr_over(low_jets(), 1)), 1..4)
        .prop_filter_map("normalizable", |terms| {
            let mut f = Form::zero(1);
            for (d, e) in terms {
                let c = normalize(&e).ok()?;
                f = f.add(&Form::basis(vec![d], c).ok()?).ok()?;
            }
            Some(f)
        })
        .boxed()
}

pub fn d_squared(cases: u32) -> Result<(), String> {
    let ctx = Context::new().with_base(&rmmdkp());
    outcome(runner(cases).run(&one_form(), |a| {
        let dd = exterior_d(&exterior_d(&a, &ctx).unwrap(), &ctx).unwrap();
        prop_assert!(dd.is_zero(), "d(d a) = {:?}", dd);
        Ok(())
    }))
}

pub fn wedge_antisymmetry(cases: u32) -> Result<(), String> {
    outcome(runner(cases).run(&(one_form(), one_form()), |(a, b)| {
        let ab = wedge(&a, &b).unwrap();
        let ba = wedge(&b, &a).unwrap();
        prop_assert!(ab.add(&ba).unwrap().is_zero(), "a^b + b^a != 0");
        prop_assert!(wedge(&a, &a).unwrap().is_zero(), "a^a != 0");
        Ok(())
    }))
}

fn point() -> BoxedStrategy<SamplePoint> {
    let vals = proptest::collection::vec((1i64..=9, 1i64..=4), 7);
    (1i64..=3, vals)
        .prop_map(|(k, vs)| SamplePoint {
            kappa: BigRational::from_integer(BigInt::from(k)),
            values: low_jets()
                .into_iter()
                .zip(vs)
                .map(|(v, (p, q))| (v, BigRational::new(p.into(), q.into())))
                .collect::<BTreeMap<_, _>>(),
        })
        .boxed()
}

/// Exact evaluation commutes with normalization. Values are positive, so powers of
/// variables with kappa-dependent exponents stay rational only when integral; those
/// points are skipped by the evaluator's errors.
pub fn eval_homomorphism(cases: u32) -> Result<(), String> {
    outcome(runner(cases).run(&(rational_over(low_jets()), point()), |(e, p)| {
        let r = norm(&e)?;
        let raw = match eval_exact(&e, &p) {
            Ok(v) => v,
            Err(KernelError::DivisionByZero) => return Err(TestCaseError::reject("pole")),
            Err(err) => return Err(TestCaseError::fail(format!("raw evaluation: {err}"))),
        };
        let n = eval_rat(&r, &p).map_err(|err| TestCaseError::fail(format!("normalized evaluation: {err}")))?;
        prop_assert_eq!(raw, n);
        Ok(())
    }))
}
