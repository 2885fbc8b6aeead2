mod props;

use std::collections::BTreeSet;

use jetforge_core::forms::{exterior_d, wedge, Differential, Form};
use jetforge_core::oracle::raw::RawContext;
use jetforge_core::oracle::{confirm, eval_rat, Probe, SamplePoint, Sampler, Verdict};
use jetforge_core::{normalize, Context, Direction, Exponent, Expr, KernelError, RatExpr};
use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use props::{jet, raw_pow, rmmdkp, rmmdkp_excluded, rmmdkp_rhs, sym};

fn v(s: &str, ord: [u8; 3]) -> RatExpr {
    RatExpr::var(jet(s, ord))
}

fn ux() -> RatExpr {
    v("u", [0, 1, 0])
}

fn e(a: i64, b: i64) -> Exponent {
    Exponent::new(Rational64::from_integer(a), Rational64::from_integer(b))
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn n(x: &Expr) -> RatExpr {
    normalize(x).unwrap()
}

#[test]
fn exponents_add_and_cancel() {
    let a = ux().pow_exponent(&e(1, 1)).unwrap();
    let b = ux().pow_exponent(&e(2, 1)).unwrap();
    assert_eq!(a.mul(&b), ux().pow_exponent(&e(3, 2)).unwrap());
    let inv = ux().pow_exponent(&e(-1, -1)).unwrap();
    assert_eq!(a.mul(&inv), RatExpr::one());
}

#[test]
fn one_coefficient_written_two_ways() {
    let k = Expr::kappa;
    let ux = jet("u", [0, 1, 0]);
    let den = || Expr::add(vec![Expr::mul(vec![Expr::int(2), k()]), Expr::int(3)]);
    let first = Expr::mul(vec![
        Expr::div(Expr::pow(Expr::add(vec![k(), Expr::int(1)]), Expr::int(2)), den()),
        Expr::pow(Expr::var(ux), Expr::mul(vec![Expr::int(2), Expr::add(vec![k(), Expr::int(1)])])),
    ]);
    let kk = Expr::add(vec![Expr::pow(k(), Expr::int(2)), Expr::mul(vec![Expr::int(2), k()]), Expr::int(1)]);
    let second = Expr::mul(vec![Expr::div(kk, den()), raw_pow(ux, 2, 2)]);
    assert!(n(&Expr::sub(first, second)).is_zero());
}

#[test]
fn zero_tests() {
    assert!(RatExpr::zero().is_zero());
    assert!(ux().sub(&ux()).is_zero());
    let uy = v("u", [0, 0, 1]);
    let two_k_3 = RatExpr::kappa().scale(&jetforge_core::KappaRational::from_int(2)).add(&RatExpr::int(3));
    let r = two_k_3.mul(&uy).sub(&RatExpr::kappa().mul(&uy).mul(&RatExpr::int(2))).sub(&uy.mul(&RatExpr::int(3)));
    assert!(r.is_zero());
}

#[test]
fn substitution_recovers_q_ratio() {
    let (uy, qx, qy) = (v("u", [0, 0, 1]), v("q", [0, 1, 0]), v("q", [0, 0, 1]));
    let f = uy.div(&ux()).unwrap().add(&ux().pow_exponent(&e(1, 1)).unwrap());
    let repl = qy.div(&qx).unwrap().mul(&ux()).sub(&ux().pow_exponent(&e(2, 1)).unwrap());
    let uyv = jet("u", [0, 0, 1]);
    let out = f.substitute(&|w| (*w == uyv).then(|| repl.clone())).unwrap();
    assert!(out.equals(&qy.div(&qx).unwrap()));
}

#[test]
fn substitution_identity_and_monomial_binding() {
    let uxv = jet("u", [0, 1, 0]);
    assert_eq!(ux().substitute(&|w| (*w == uxv).then(ux)).unwrap(), ux());
    let vv = v("v", [0, 0, 0]);
    let f = ux().pow_exponent(&e(1, 1)).unwrap();
    let out = f.substitute(&|w| (*w == uxv).then(|| ux().mul(&vv))).unwrap();
    let want = ux().pow_exponent(&e(1, 1)).unwrap().mul(&vv.pow_exponent(&e(1, 1)).unwrap());
    assert_eq!(out, want);
}

#[test]
fn partial_derivatives() {
    let uxv = jet("u", [0, 1, 0]);
    let p = ux().pow_exponent(&e(3, 2)).unwrap().partial(&uxv);
    let coeff = RatExpr::kappa().mul(&RatExpr::int(2)).add(&RatExpr::int(3));
    assert!(p.equals(&coeff.mul(&ux().pow_exponent(&e(2, 2)).unwrap())));
    let uy = v("u", [0, 0, 1]);
    assert!(uy.div(&ux()).unwrap().partial(&jet("u", [0, 0, 1])).equals(&ux().inv().unwrap()));
    let c = RatExpr::kappa().add(&RatExpr::int(7)).div(&RatExpr::kappa().add(&RatExpr::int(2))).unwrap();
    assert!(c.partial(&uxv).is_zero());
}

#[test]
fn total_derivatives() {
    let free = Context::new().with_free(sym("u"));
    assert_eq!(free.total_derivative(&v("u", [0, 0, 1]), Direction::X).unwrap(), v("u", [0, 1, 1]));
    let d = free.total_derivative(&ux().pow_exponent(&e(1, 1)).unwrap(), Direction::T).unwrap();
    let want = RatExpr::kappa().add(&RatExpr::one()).mul(&ux().pow_exponent(&e(0, 1)).unwrap()).mul(&v("u", [1, 1, 0]));
    assert!(d.equals(&want));

    let eq = rmmdkp();
    let ctx = Context::new().with_base(&eq);
    assert!(ctx.total_derivative(&v("u", [0, 0, 1]), Direction::Y).unwrap().equals(&eq.rhs));
}

#[test]
fn reduction_to_internal_coordinates() {
    let eq = rmmdkp();
    let ctx = Context::new().with_base(&eq);
    assert!(ctx.reduce(&jet("u", [0, 0, 2])).unwrap().equals(&eq.rhs));
    assert_eq!(ctx.reduce(&jet("u", [0, 1, 1])).unwrap(), v("u", [0, 1, 1]));
    let dx_e = ctx.total_derivative(&eq.rhs, Direction::X).unwrap();
    assert!(ctx.reduce(&jet("u", [0, 1, 2])).unwrap().equals(&dx_e));
}

#[test]
fn commutation_on_internal_coordinates() {
    let ctx = Context::new().with_base(&rmmdkp());
    assert!(ctx.commutation_check(&v("u", [0, 0, 1]), Direction::T, Direction::X).unwrap().is_zero());
}

/// [D_x, D_y] E vanishes symbolically; the unnormalized evaluator agrees at sample points.
#[test]
fn commutation_of_the_equation_rhs_is_oracle_confirmed() {
    let eq = rmmdkp();
    let ctx = Context::new().with_base(&eq);
    let c = ctx.commutation_check(&eq.rhs, Direction::X, Direction::Y).unwrap();
    assert!(c.is_zero());

    let rctx = RawContext::new().with_base(jet("u", [0, 0, 2]), rmmdkp_rhs());
    let e = rmmdkp_rhs();
    let xy = rctx.total_derivative(&rctx.total_derivative(&e, Direction::Y).unwrap(), Direction::X).unwrap();
    let yx = rctx.total_derivative(&rctx.total_derivative(&e, Direction::X).unwrap(), Direction::Y).unwrap();
    let src = Expr::sub(xy, yx);
    let excluded = rmmdkp_excluded();
    let probe = Probe { normalized: Some(&c), source: Some(&src), nonvanishing: &[], excluded: &excluded };
    let rep = confirm(&probe, 5, 11).unwrap();
    assert_eq!(rep.verdict, Verdict::ZeroConfirmed);
    assert_eq!(rep.points, 5);
}

#[test]
fn wedge_of_a_differential_with_itself() {
    let dt = Form::differential(Differential::Coord(Direction::T));
    assert!(wedge(&dt, &dt).unwrap().is_zero());
}

#[test]
fn exterior_derivatives() {
    let ctx = Context::new().with_free(sym("u"));
    let uxv = jet("u", [0, 1, 0]);
    let dx = Differential::Coord(Direction::X);
    let a = Form::basis(vec![dx], ux()).unwrap();
    let want = Form::basis(vec![Differential::Jet(uxv), dx], RatExpr::one()).unwrap();
    assert_eq!(exterior_d(&a, &ctx).unwrap(), want);

    let uxx = jet("u", [0, 2, 0]);
    let dt = Differential::Coord(Direction::T);
    let xi1 = Form::basis(vec![dt], RatExpr::var(uxx).mul(&ux().pow_exponent(&e(1, 2)).unwrap())).unwrap();
    let want = Form::basis(vec![Differential::Jet(uxx), dt], ux().pow_exponent(&e(1, 2)).unwrap())
        .unwrap()
        .add(
            &Form::basis(
                vec![Differential::Jet(uxv), dt],
                RatExpr::kappa().mul(&RatExpr::int(2)).add(&RatExpr::one()).mul(&RatExpr::var(uxx)).mul(&ux().pow_exponent(&e(0, 2)).unwrap()),
            )
            .unwrap(),
        )
        .unwrap();
    assert!(exterior_d(&xi1, &ctx).unwrap().sub(&want).unwrap().is_zero());
}

#[test]
fn sampler_respects_assumptions() {
    let ux_raw = Expr::var(jet("u", [0, 1, 0]));
    let ux_n = n(&ux_raw);
    let probe = Probe { normalized: Some(&ux_n), source: None, nonvanishing: std::slice::from_ref(&ux_raw), excluded: &[] };
    let rep = confirm(&probe, 5, 1).unwrap();
    assert_eq!(rep.points, 5);
    assert_eq!(rep.verdict, Verdict::Nonzero);
    let w = rep.witness.unwrap();
    assert!(w.point.values.values().all(|x| *x != int(0)));

    let two_k_3 = Expr::add(vec![Expr::mul(vec![Expr::int(2), Expr::kappa()]), Expr::int(3)]);
    let probe = Probe { normalized: Some(&ux_n), source: None, nonvanishing: std::slice::from_ref(&two_k_3), excluded: &[] };
    assert_eq!(confirm(&probe, 5, 1).unwrap().rejected, 0);

    let dead = Expr::sub(ux_raw.clone(), ux_raw);
    let probe = Probe { normalized: Some(&ux_n), source: None, nonvanishing: std::slice::from_ref(&dead), excluded: &[] };
    assert_eq!(confirm(&probe, 5, 1), Err(KernelError::SamplingExhausted));
}

#[test]
fn sampler_is_seeded() {
    let vars: BTreeSet<_> = [jet("u", [0, 1, 0]), jet("u", [0, 0, 1])].into_iter().collect();
    let a = Sampler::new(3, &[]).point(&vars, &BTreeSet::new());
    let b = Sampler::new(3, &[]).point(&vars, &BTreeSet::new());
    assert_eq!(a, b);
}

#[test]
fn exact_evaluation() {
    let uxv = jet("u", [0, 1, 0]);
    let p = SamplePoint { kappa: int(2), values: [(uxv, int(3))].into_iter().collect() };
    assert_eq!(eval_rat(&ux().pow_exponent(&e(1, 1)).unwrap(), &p).unwrap(), int(27));
}

/// u = x: u_x = 1 and every other jet of order >= 1 vanishes, so u_yy = E holds.
#[test]
fn linear_solution_satisfies_the_equation() {
    let eq = rmmdkp();
    let mut values: std::collections::BTreeMap<_, _> = eq.residual().vars().into_iter().map(|w| (w, int(0))).collect();
    values.insert(jet("u", [0, 1, 0]), int(1));
    for k in 1..=3 {
        let p = SamplePoint { kappa: int(k), values: values.clone() };
        assert_eq!(eval_rat(&eq.residual(), &p).unwrap(), int(0));
    }
}

#[test]
fn literal_zero_is_confirmed() {
    let z = Expr::int(0);
    let zn = n(&z);
    let probe = Probe { normalized: Some(&zn), source: Some(&z), nonvanishing: &[], excluded: &[] };
    let rep = confirm(&probe, 5, 0).unwrap();
    assert_eq!((rep.verdict, rep.points), (Verdict::ZeroConfirmed, 5));
}
