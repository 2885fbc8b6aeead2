mod support;

use jetforge::checks::lookup;
use jetforge::dsl::{parse::parse_expr, print};
use jetforge::eval::{Evaluator, Kernel};
use jetforge::workspace::Workspace;
use jetforge_core::coverings::{derive_third_order, eliminate_w, inverse_of_covering, quotient_residual, verify_factorization, InverseSystem};
use jetforge_core::forms::{solve_coefficients, Differential, Form};
use jetforge_core::linear::solve_linear;
use jetforge_core::{normalize, Context, Covering, Direction, Equation, JetVar, KernelError, RatExpr, Symbol};
use num_bigint::BigInt;
use num_rational::BigRational;
use support::props::{jet, rmmdkp_excluded, rmmdkp_rhs, sym};

fn bundled() -> Workspace {
    Workspace::all_bundled().unwrap()
}

fn scalar(src: &str) -> Result<RatExpr, String> {
    let ws = Workspace::load_str("<test>", "symbol u, q;").unwrap();
    let ctx = Context::new();
    let k = Kernel { ctx: &ctx };
    let ast = parse_expr(src).map_err(|d| d.to_string())?;
    Evaluator::new(&ws, &k).scalar_in("<test>", &ast).map_err(|d| d.to_string())
}

fn v(s: &str, o: [u8; 3]) -> RatExpr {
    RatExpr::var(jet(s, o))
}

fn one() -> BigRational {
    BigRational::from_integer(BigInt::from(1))
}

#[test]
fn bundled_equation_matches_hand_entry() {
    let eq = lookup::equation(&bundled(), "rmmdKP").unwrap();
    assert_eq!(eq.principal, jet("u", [0, 0, 2]));
    assert!(eq.rhs.equals(&normalize(&rmmdkp_rhs()).unwrap()));
    let mut ex = eq.excluded.clone();
    ex.sort();
    let mut want = rmmdkp_excluded();
    want.sort();
    assert_eq!(ex, want);
}

#[test]
fn two_term_polynomial() {
    let r = scalar("u[y,y] - u[t,x]").unwrap();
    assert_eq!(r.term_count(), 2);
    assert!(r.den_factors().is_empty());
}

#[test]
fn non_affine_exponent_is_rejected() {
    let err = scalar("u[x]^(1/(kappa+1))").unwrap_err();
    assert!(err.contains("<test>:1:"), "{err}");
    assert!(err.to_lowercase().contains("exponent"), "{err}");
}

#[test]
fn printing() {
    assert_eq!(print::ratexpr(&scalar("u[x]^(kappa+1) * u[x]").unwrap()), "u[x]^(kappa+2)");
    assert_eq!(print::ratexpr(&RatExpr::zero()), "0");
}

#[test]
fn covering_c16_inverts_to_system_19() {
    let ws = bundled();
    let (inv, _) = inverse_of_covering(&lookup::covering(&ws, "c16").unwrap()).unwrap();
    let inv19 = lookup::inverse(&ws, "inv19").unwrap();
    assert!(inv.u_t.equals(&inv19.u_t));
    assert!(inv.u_y.equals(&inv19.u_y));
}

#[test]
fn covering_c15_solved_for_u_y() {
    let (inv, _) = inverse_of_covering(&lookup::covering(&bundled(), "c15").unwrap()).unwrap();
    let want = scalar("q[y]/q[x]*u[x] - u[x]^(kappa+2)").unwrap();
    assert!(inv.u_y.equals(&want));
}

fn specialize(c: &Covering, k: &BigRational) -> Covering {
    let base = &c.base;
    let base = Equation::new(&base.name, base.principal, base.rhs.specialize_kappa(k).unwrap(), vec![]).unwrap();
    Covering { base, f_t: c.f_t.specialize_kappa(k).unwrap(), f_y: c.f_y.specialize_kappa(k).unwrap(), ..c.clone() }
}

#[test]
fn elimination_commutes_with_kappa_specialization() {
    let ws = bundled();
    let c2 = lookup::covering(&ws, "c2").unwrap();
    let target = lookup::equation(&ws, "rmmdKP").unwrap();
    let (_, general) = eliminate_w(&c2, &target, 6).unwrap();
    assert!(general.holds());

    let c2_1 = specialize(&c2, &one());
    let t1 = Equation::new(&target.name, target.principal, target.rhs.specialize_kappa(&one()).unwrap(), vec![]).unwrap();
    let (_, special) = eliminate_w(&c2_1, &t1, 6).unwrap();
    assert!(special.holds());
    assert!(special.cofactor.equals(&general.cofactor.specialize_kappa(&one()).unwrap()));
}

#[test]
fn degenerate_linear_system_is_singular() {
    let ut = jet("u", [1, 0, 0]);
    let zero_ut = RatExpr::zero().mul(&RatExpr::var(ut));
    assert_eq!(solve_linear(&[zero_ut], &[ut]), Err(KernelError::Singular));
}

fn trivial_inverse() -> InverseSystem {
    InverseSystem { name: "zero".into(), over: sym("r"), unknown: sym("u"), u_t: RatExpr::zero(), u_y: RatExpr::zero() }
}

#[test]
fn trivial_inverse_system_has_zero_residual() {
    assert!(quotient_residual(&trivial_inverse(), 6).unwrap().is_zero());
}

#[test]
fn zero_residual_factors_through_zero_target() {
    assert!(verify_factorization(&RatExpr::zero(), &v("u", [0, 1, 0]), &RatExpr::zero()).holds());
}

#[test]
fn third_order_bracket_is_linear_in_opaque_derivatives() {
    let ws = bundled();
    let inv = lookup::inverse(&ws, "inv19").unwrap();
    let h = lookup::scalar(&ws, "H_solved").unwrap();
    let target = lookup::scalar(&ws, "L21_derived").unwrap();
    let th = derive_third_order(&inv, &h, &target, sym("H"), 6).unwrap();
    assert_eq!(th.derivative_degrees, [1, 1, 1]);
    assert!(th.formula_agrees);
    assert!(th.bracket.vars().iter().all(|w| w.sym != sym("u")));
}

#[test]
fn third_order_bracket_of_zero_system_vanishes() {
    let th = derive_third_order(&trivial_inverse(), &v("r", [0, 1, 0]), &RatExpr::zero(), sym("H"), 6).unwrap();
    assert!(th.bracket_opaque.is_zero());
    assert!(th.bracket.is_zero());
}

/// Residual (A - f) dt^dx + (2A - 2f) dx^dy recovers A = f.
#[test]
fn planted_coefficient_is_recovered() {
    let a: JetVar = JetVar::base(Symbol::new("A1").unwrap());
    let f = scalar("u[x]^(kappa+1)*u[y]/(u[x]+1)").unwrap();
    let c = RatExpr::var(a).sub(&f);
    let dt = Differential::Coord(Direction::T);
    let dx = Differential::Coord(Direction::X);
    let dy = Differential::Coord(Direction::Y);
    let res = Form::basis(vec![dt, dx], c.clone()).unwrap().add(&Form::basis(vec![dx, dy], c.mul(&RatExpr::int(2))).unwrap()).unwrap();
    let sol = solve_coefficients(&res, &[a]).unwrap();
    assert_eq!(sol.values.len(), 1);
    assert!(sol.values[0].1.equals(&f));
}

#[test]
fn no_unknowns_and_balanced_equation() {
    let sol = solve_coefficients(&Form::zero(2), &[]).unwrap();
    assert!(sol.values.is_empty());
}
