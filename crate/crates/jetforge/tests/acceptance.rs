//! One line per acceptance criterion. Criteria the engine proves false on the bundled
//! definitions print FAIL; the test asserts the whole outcome vector against the pinned
//! one below, so a change in either direction is caught.

mod support;

use std::collections::BTreeMap;
use std::io::Write;

use jetforge::checks::{CheckResult, Options, Status};
use jetforge::report::Report;
use jetforge::suite;
use jetforge::workspace::Workspace;
use jetforge_core::oracle::DEFAULT_POINTS;

const SEED: u64 = 0;
const POINTS: usize = 5;
const ZERO: &str = "ZERO-CONFIRMED";
const NONZERO: &str = "NONZERO";

/// Criteria 4, 6, 8 and 9 do not hold for the definitions as printed.
const EXPECTED: [bool; 11] = [true, true, true, false, true, false, true, false, false, true, true];

struct Run {
    checks: BTreeMap<String, CheckResult>,
}

impl Run {
    fn get(&self, name: &str) -> &CheckResult {
        self.checks.get(name).unwrap_or_else(|| panic!("suite has no check {name}"))
    }

    fn pass(&self, name: &str) -> bool {
        self.get(name).status == Status::Pass
    }

    fn oracle(&self, name: &str, verdict: &str) -> bool {
        let c = self.get(name);
        c.oracle.as_ref().is_some_and(|o| o.verdict == verdict && o.agrees && o.points == POINTS)
    }

    fn under_ms(&self, name: &str, ms: u64) -> bool {
        self.get(name).wall_ms.is_some_and(|w| w < ms)
    }

    fn detail(&self, name: &str, key: &str) -> Option<&str> {
        self.get(name).details.get(key).map(String::as_str)
    }

    fn unit_cofactor(&self, name: &str) -> bool {
        let c = self.get(name);
        c.cofactor.as_ref().is_some_and(|s| !s.zero) && c.cofactor_unit == Some(true)
    }
}

fn suite_run() -> Run {
    let ws = Workspace::load_bundled("paper-suite.jf").expect("bundled suite loads");
    let opts = Options { seed: SEED, points: POINTS, max_order: jetforge_core::jet::DEFAULT_MAX_ORDER, timings: true };
    let report: Report = suite::run(&ws, "paper-suite.jf", &opts, 4).expect("suite validates");
    Run { checks: report.checks.into_iter().map(|c| (c.name.clone(), c)).collect() }
}

fn c1(r: &Run) -> bool {
    ["compat_c2", "compat_c15", "compat_c16", "compat_c17"]
        .iter()
        .all(|n| r.pass(n) && r.get(n).residual.as_ref().is_some_and(|s| s.zero) && r.oracle(n, ZERO) && r.under_ms(n, 60_000))
}

fn c2(r: &Run) -> bool {
    let n = "eliminate_c2";
    r.pass(n) && r.oracle(n, ZERO) && r.detail(n, "remainder_terms") == Some("0") && r.unit_cofactor(n)
}

fn c3(r: &Run) -> bool {
    let n = "quotient_c15";
    r.pass(n) && r.oracle(n, ZERO) && r.detail(n, "remainder_terms") == Some("0") && r.get(n).cofactor.as_ref().is_some_and(|s| !s.zero)
}

fn c4(r: &Run) -> bool {
    let n = "factor_inv19";
    r.pass(n) && r.oracle(n, ZERO) && r.detail(n, "remainder_terms") == Some("0")
}

fn c5(r: &Run) -> bool {
    let (k0, k1) = ("kappa0_inv19", "kappa1_inv19");
    let k0_ok = r.pass(k0) && r.oracle(k0, ZERO) && r.unit_cofactor(k0);
    let k1_refuted = r.get(k1).status == Status::Fail && r.get(k1).cofactor_unit == Some(false);
    k0_ok && k1_refuted
}

fn c6(r: &Run) -> bool {
    let n = "third_order_inv19";
    r.pass(n) && r.oracle(n, ZERO) && r.detail(n, "u_jets_eliminated") == Some("true") && r.under_ms(n, 300_000)
}

fn c7(r: &Run) -> bool {
    let n = "autobacklund_c17";
    r.pass(n) && r.get(n).residual.as_ref().is_some_and(|s| s.zero) && r.oracle(n, ZERO) && r.under_ms(n, 300_000)
}

fn c8(r: &Run) -> bool {
    ["structure_dth0", "structure_dth2", "structure_dxi1", "structure_dxi2", "structure_dxi3"].iter().all(|n| {
        let c = r.get(n);
        let agree = !c.readings.is_empty() && c.readings.iter().all(|rd| rd.agrees);
        let adopted = c.adopted_reading.as_ref().and_then(|a| c.readings.iter().find(|rd| &rd.reading == a));
        agree && adopted.is_some_and(|rd| rd.zero && rd.pairs.iter().all(|p| p.oracle.verdict == ZERO))
    })
}

fn c9(r: &Run) -> bool {
    let c = r.get("coeffs_dth3");
    c.status == Status::Pass
        && c.readings.iter().any(|rd| {
            rd.solver.as_ref().is_some_and(|s| {
                s.outcome == "solved"
                    && ["A130", "A132", "A133"].iter().all(|a| s.solution.contains_key(*a))
                    && s.back_substituted_zero == Some(true)
            })
        })
}

fn c10() -> bool {
    use support::props::*;
    let n = CASES;
    let suites: [(&str, Result<(), String>); 8] = [
        ("normalize idempotence", normalize_idempotent(n)),
        ("ring laws", ring_laws(n)),
        ("Leibniz rule", leibniz(n)),
        ("total-derivative commutation", commutation(n)),
        ("d o d = 0", d_squared(n)),
        ("wedge antisymmetry", wedge_antisymmetry(n)),
        ("eval homomorphism", eval_homomorphism(n)),
        ("parse/print round-trip", support::parse_print_roundtrip(n)),
    ];
    let mut ok = true;
    for (what, res) in suites {
        if let Err(e) = res {
            println!("    property {what} failed: {e}");
            ok = false;
        }
    }
    ok
}

fn c11(r: &Run) -> bool {
    let scalar = ["mut_c15_compat", "mut_c16_compat", "mut_c2_eliminate", "mut_c17_autobacklund", "mut_fac20_G"];
    let scalar_ok = scalar.iter().all(|n| {
        let c = r.get(n);
        let symbolic_nonzero = match r.detail(n, "remainder_terms") {
            Some(t) => t != "0",
            None => c.residual.as_ref().is_some_and(|s| !s.zero),
        };
        c.status == Status::Fail && symbolic_nonzero && r.oracle(n, NONZERO)
    });
    let n = "mut_dxi1_U1";
    let c = r.get(n);
    let form_ok = c.status == Status::Fail
        && r.detail(n, "differs_from_unmodified") == Some("true")
        && !c.readings.is_empty()
        && c.readings.iter().all(|rd| {
            rd.agrees && !rd.zero && rd.pairs.iter().any(|p| !p.residual.zero && p.oracle.verdict == NONZERO)
        });
    scalar_ok && form_ok
}

#[test]
fn acceptance() {
    assert_eq!(POINTS, DEFAULT_POINTS);
    let run = std::thread::Builder::new()
        .stack_size(suite::STACK)
        .spawn(|| {
            let r = suite_run();
            [c1(&r), c2(&r), c3(&r), c4(&r), c5(&r), c6(&r), c7(&r), c8(&r), c9(&r), c10(), c11(&r)]
        })
        .unwrap()
        .join()
        .unwrap();
    let labels = [
        "covering validity",
        "elimination of w",
        "quotient derivation",
        "factorized compatibility",
        "kappa=0 specialization",
        "third-order equation",
        "auto-Backlund",
        "structure equations",
        "coefficient recovery",
        "engine soundness properties",
        "negative controls",
    ];
    // Written to stdout directly so the lines survive the harness's output capture.
    let mut lines = String::from("\n");
    for (i, (ok, label)) in run.iter().zip(labels).enumerate() {
        let note = if *ok == EXPECTED[i] { "" } else { "  (unexpected)" };
        lines += &format!("criterion {:>2} {:<30} {}{note}\n", i + 1, label, if *ok { "PASS" } else { "FAIL" });
    }
    std::io::stdout().write_all(lines.as_bytes()).unwrap();
    assert_eq!(run, EXPECTED, "acceptance outcomes changed");
}
