//! Compatibility of coverings, quotient equations and their factorizations.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{KernelError, Result};
use crate::exponent::Exponent;
use crate::jet::{Context, Covering, Equation};
use crate::kappa::KappaRational;
use crate::linear::{linear_parts, solve_linear};
use crate::monomial::Monomial;
use crate::poly::PolyExpr;
use crate::ratexpr::RatExpr;
use crate::symbol::{Direction, JetVar, Symbol};

/// `unknown_t`, `unknown_y` expressed through the jets of `over` and the x-jets of `unknown`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InverseSystem {
    pub name: String,
    pub over: Symbol,
    pub unknown: Symbol,
    pub u_t: RatExpr,
    pub u_y: RatExpr,
}

impl InverseSystem {
    pub fn specialize_kappa(&self, k: &BigRational) -> Result<Self> {
        Ok(InverseSystem { u_t: self.u_t.specialize_kappa(k)?, u_y: self.u_y.specialize_kappa(k)?, ..self.clone() })
    }
}

/// `residual = cofactor * target` when `remainder` is zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub residual: RatExpr,
    pub cofactor: RatExpr,
    pub target: RatExpr,
    pub remainder: RatExpr,
}

impl Factorization {
    pub fn new(residual: RatExpr, cofactor: RatExpr, target: RatExpr) -> Self {
        let remainder = residual.sub(&cofactor.mul(&target));
        Factorization { residual, cofactor, target, remainder }
    }

    pub fn holds(&self) -> bool {
        self.remainder.is_zero()
    }
}

/// Everything a computation divided by: denominator factors, variables under
/// negative powers and kappa denominators. Sorted and deduplicated.
pub fn nonvanishing<'a>(exprs: impl IntoIterator<Item = &'a RatExpr>) -> Vec<PolyExpr> {
    let mut out = BTreeSet::new();
    let kappa = |c: &KappaRational, out: &mut BTreeSet<PolyExpr>| {
        if c.den().degree().is_some_and(|d| d > 0) {
            out.insert(PolyExpr::constant(KappaRational::from_poly(c.den().primitive())));
        }
    };
    for e in exprs {
        let polys = core::iter::once(e.num()).chain(e.den_factors().iter().map(|(f, _)| f));
        for (f, _) in e.den_factors() {
            out.insert(f.clone());
        }
        for p in polys {
            for (m, c) in p.terms() {
                kappa(c, &mut out);
                for (v, x) in m.vars() {
                    if x.a.is_negative() || !x.b.is_zero() {
                        out.insert(PolyExpr::var(*v));
                    }
                }
            }
        }
    }
    out.into_iter().collect()
}

/// D_y(f_t) - D_t(f_y) on the solution manifold of the base equation.
pub fn check_compatibility(c: &Covering, max_order: u32) -> Result<RatExpr> {
    let ctx = Context::new().with_base(&c.base).with_covering(c).with_max_order(max_order);
    cross_difference(&ctx, &c.f_t, &c.f_y)
}

fn cross_difference(ctx: &Context, f_t: &RatExpr, f_y: &RatExpr) -> Result<RatExpr> {
    let a = ctx.total_derivative(f_t, Direction::Y)?;
    let b = ctx.total_derivative(f_y, Direction::T)?;
    Ok(a.sub(&b))
}

/// Cofactor c with `r = c * (principal - rhs)`, obtained by long division in the principal
/// derivative. Fails with NotDivisible when the quotient would depend on the principal.
pub fn divide_by_principal(r: &RatExpr, eq: &Equation) -> Result<RatExpr> {
    let target = eq.residual();
    if r.is_zero() {
        return Ok(RatExpr::zero());
    }
    let p = eq.principal;
    let (cu, mu, core) = target.num().split_unit();
    let q = r.num().div_exact_in(&core, &p).ok_or(KernelError::NotDivisible)?;
    let unit = RatExpr::from_poly(PolyExpr::term(mu, cu));
    let c = RatExpr::from_parts(q, r.den_factors())?
        .mul(&RatExpr::from_poly(target.den()))
        .div(&unit)?;
    if c.contains_var(&p) {
        return Err(KernelError::NotDivisible);
    }
    Ok(c)
}

/// The cross-difference over free base jets, factored through the base equation.
pub fn offshell_residual(c: &Covering, max_order: u32) -> Result<Factorization> {
    let ctx = Context::new().with_free(c.base.unknown()).with_covering(c).with_max_order(max_order);
    let r = cross_difference(&ctx, &c.f_t, &c.f_y)?;
    let cofactor = divide_by_principal(&r, &c.base)?;
    Ok(Factorization::new(r, cofactor, c.base.residual()))
}

/// Solve `eqs = 0` one unknown at a time, each time picking an equation linear in it.
pub fn eliminate_sequential(eqs: &[RatExpr], unknowns: &[JetVar]) -> Result<Vec<(JetVar, RatExpr)>> {
    let mut eqs: Vec<Option<RatExpr>> = eqs.iter().cloned().map(Some).collect();
    let mut solved: Vec<(JetVar, RatExpr)> = Vec::new();
    let mut pending: Vec<JetVar> = unknowns.to_vec();
    while !pending.is_empty() {
        let mut progress = None;
        'search: for (ui, x) in pending.iter().enumerate() {
            for (ei, e) in eqs.iter().enumerate() {
                let Some(e) = e else { continue };
                if !e.contains_var(x) {
                    continue;
                }
                if linear_parts(e, core::slice::from_ref(x)).is_ok() {
                    progress = Some((ui, ei));
                    break 'search;
                }
            }
        }
        let (ui, ei) = progress.ok_or_else(|| KernelError::NonLinear(pending[0].render()))?;
        let x = pending.remove(ui);
        let e = eqs[ei].take().unwrap();
        let sol = solve_linear(&[e], &[x])?;
        let value = sol.values[0].1.clone();
        for other in eqs.iter_mut().flatten() {
            *other = other.substitute(&|v| (*v == x).then(|| value.clone()))?;
        }
        for (_, s) in solved.iter_mut() {
            *s = s.substitute(&|v| (*v == x).then(|| value.clone()))?;
        }
        solved.push((x, value));
    }
    Ok(solved)
}

/// Eliminate the base unknown `w` of a covering whose pseudopotential is `u`: solve
/// `u_t = f_t`, `u_y = f_y` for w_x and w_y, cross-differentiate over free u-jets and factor
/// the result through `target` (an equation for u).
pub fn eliminate_w(c: &Covering, target: &Equation, max_order: u32) -> Result<(Vec<(JetVar, RatExpr)>, Factorization)> {
    let w = c.base.unknown();
    let u = c.pseudo;
    let eqs = [
        RatExpr::var(JetVar::new(u, [1, 0, 0])).sub(&c.f_t),
        RatExpr::var(JetVar::new(u, [0, 0, 1])).sub(&c.f_y),
    ];
    let wx = JetVar::new(w, [0, 1, 0]);
    let wy = JetVar::new(w, [0, 0, 1]);
    let solved = eliminate_sequential(&eqs, &[wx, wy])?;
    let get = |v: JetVar| solved.iter().find(|(x, _)| *x == v).unwrap().1.clone();
    let (ex, ey) = (get(wx), get(wy));
    if let Some(v) = ex.vars().into_iter().chain(ey.vars()).find(|v| v.sym == w) {
        return Err(KernelError::NonLinear(v.render()));
    }
    let ctx = Context::new().with_free(u).with_max_order(max_order);
    let r = ctx.total_derivative(&ex, Direction::Y)?.sub(&ctx.total_derivative(&ey, Direction::X)?);
    let cofactor = divide_by_principal(&r, target)?;
    Ok((solved, Factorization::new(r, cofactor, target.residual())))
}

/// Solve a covering for the base unknown's t- and y-derivatives.
pub fn inverse_of_covering(c: &Covering) -> Result<(InverseSystem, Vec<PolyExpr>)> {
    let u = c.base.unknown();
    let p = c.pseudo;
    let eqs = [
        RatExpr::var(JetVar::new(p, [1, 0, 0])).sub(&c.f_t),
        RatExpr::var(JetVar::new(p, [0, 0, 1])).sub(&c.f_y),
    ];
    let ut = JetVar::new(u, [1, 0, 0]);
    let uy = JetVar::new(u, [0, 0, 1]);
    let sol = solve_linear(&eqs, &[ut, uy])?;
    let inv = InverseSystem {
        name: format!("{}_inverse", c.name),
        over: p,
        unknown: u,
        u_t: sol.values[0].1.clone(),
        u_y: sol.values[1].1.clone(),
    };
    Ok((inv, sol.divisors))
}

fn inverse_context(inv: &InverseSystem, max_order: u32) -> Context {
    Context::new()
        .with_free(inv.over)
        .with_pseudo(inv.unknown, inv.u_t.clone(), inv.u_y.clone())
        .with_max_order(max_order)
}

/// D_y(u_t) - D_t(u_y) with the unknown treated as a pseudopotential over free jets.
pub fn quotient_residual(inv: &InverseSystem, max_order: u32) -> Result<RatExpr> {
    cross_difference(&inverse_context(inv, max_order), &inv.u_t, &inv.u_y)
}

pub fn verify_factorization(residual: &RatExpr, cofactor: &RatExpr, target: &RatExpr) -> Factorization {
    Factorization::new(residual.clone(), cofactor.clone(), target.clone())
}

/// A cofactor that cannot vanish on the generic domain: one term, and every
/// denominator factor already among `allowed`.
pub fn is_unit_cofactor(c: &RatExpr, allowed: &[PolyExpr]) -> bool {
    c.num().single_term().is_some() && c.den_factors().iter().all(|(f, _)| allowed.contains(f))
}

#[derive(Clone, Debug)]
pub struct KappaCase {
    pub kappa: BigRational,
    pub residual: RatExpr,
    pub target: RatExpr,
    pub cofactor: RatExpr,
    /// The residual is a nonvanishing multiple of the target and of nothing else.
    pub unit: bool,
}

/// Specialize kappa, recompute the quotient residual and divide it by `g` (also specialized).
pub fn kappa_case(inv: &InverseSystem, g: &RatExpr, kappa: &BigRational, max_order: u32) -> Result<KappaCase> {
    let inv = inv.specialize_kappa(kappa)?;
    let target = g.specialize_kappa(kappa)?;
    let residual = quotient_residual(&inv, max_order)?;
    if target.is_zero() {
        return Err(KernelError::DivisionByZero);
    }
    let cofactor = residual.div_exact(&target).unwrap_or(residual.div(&target)?);
    let allowed = nonvanishing([&inv.u_t, &inv.u_y, &target]);
    let unit = !residual.is_zero() && is_unit_cofactor(&cofactor, &allowed);
    Ok(KappaCase { kappa: kappa.clone(), residual, target, cofactor, unit })
}

pub fn kappa_zero_case(inv: &InverseSystem, g: &RatExpr, max_order: u32) -> Result<KappaCase> {
    kappa_case(inv, g, &BigRational::from_integer(0.into()), max_order)
}

/// Replace every power u^(m*unit) in `e` by h^m. Fails when some power of `u` is not a
/// multiple of `unit`.
pub fn opaque_powers(e: &RatExpr, u: &JetVar, unit: &Exponent, h: &JetVar) -> Result<RatExpr> {
    let rewrite = |p: &PolyExpr| -> Result<PolyExpr> {
        let mut terms = Vec::with_capacity(p.len());
        for (m, c) in p.terms() {
            let (rest, x) = m.split(u);
            let mut mono = rest;
            if !x.is_zero() {
                let k = multiple_of(&x, unit)
                    .ok_or_else(|| KernelError::CancellationFailure(format!("{} appears to a power that is not a multiple of the opaque unit", u.render())))?;
                mono = mono.mul(&Monomial::power(*h, Exponent::int(k)));
            }
            terms.push((mono, c.clone()));
        }
        Ok(PolyExpr::from_terms(terms))
    };
    let num = rewrite(e.num())?;
    let mut den = RatExpr::one();
    for (f, k) in e.den_factors() {
        den = den.mul(&RatExpr::from_poly(rewrite(f)?).pow(*k as i64)?);
    }
    RatExpr::from_poly(num).div(&den)
}

fn multiple_of(x: &Exponent, unit: &Exponent) -> Option<i64> {
    let k = if !unit.b.is_zero() { x.b / unit.b } else { x.a / unit.a };
    if !k.is_integer() || unit.scale(k) != *x {
        return None;
    }
    Some(*k.numer())
}

#[derive(Clone, Debug)]
pub struct ThirdOrder {
    /// Compatibility bracket with the opaque symbol and its first derivatives.
    pub bracket_opaque: RatExpr,
    /// The bracket expressed by the bracket formula, for comparison with the direct route.
    pub formula_agrees: bool,
    /// Degree of the opaque bracket in each of h_t, h_x, h_y; linear means all at most 1.
    pub derivative_degrees: [i64; 3],
    pub degree_in_h: i64,
    pub bracket: RatExpr,
    pub target: RatExpr,
    pub cofactor: Option<RatExpr>,
    pub unit: bool,
}

/// Derive the compatibility condition of an inverse system u_t = Phi u_x, u_y = Psi u_x after
/// the substitution u_x^(kappa+1) = `h`, and compare it with `target` (an expression in the
/// jets of `inv.over` and the opaque jets h, h[t], h[x], h[y]).
pub fn derive_third_order(inv: &InverseSystem, h: &RatExpr, target: &RatExpr, hsym: Symbol, max_order: u32) -> Result<ThirdOrder> {
    let u = inv.unknown;
    let ux = JetVar::new(u, [0, 1, 0]);
    let hv = JetVar::base(hsym);
    let unit = Exponent::new(1.into(), 1.into());
    let phi = opaque_powers(&inv.u_t.div(&RatExpr::var(ux))?, &ux, &unit, &hv)?;
    let psi = opaque_powers(&inv.u_y.div(&RatExpr::var(ux))?, &ux, &unit, &hv)?;
    for e in [&phi, &psi] {
        if let Some(v) = e.vars().into_iter().find(|v| v.sym == u) {
            return Err(KernelError::CancellationFailure(format!("{} survives in the coefficients", v.render())));
        }
    }

    let ctx = Context::new()
        .with_free(inv.over)
        .with_free(hsym)
        .with_pseudo(u, phi.mul(&RatExpr::var(ux)), psi.mul(&RatExpr::var(ux)))
        .with_max_order(max_order);
    let full = cross_difference(&ctx, &phi.mul(&RatExpr::var(ux)), &psi.mul(&RatExpr::var(ux)))?;
    let bracket_opaque = full.div(&RatExpr::var(ux))?;
    if let Some(v) = bracket_opaque.vars().into_iter().find(|v| v.sym == u) {
        return Err(KernelError::CancellationFailure(format!("{} does not drop out of the compatibility condition", v.render())));
    }

    let d = |e: &RatExpr, dir| ctx.total_derivative(e, dir);
    let formula = d(&phi, Direction::Y)?
        .sub(&d(&psi, Direction::T)?)
        .add(&phi.mul(&d(&psi, Direction::X)?))
        .sub(&psi.mul(&d(&phi, Direction::X)?));
    let formula_agrees = formula.equals(&bracket_opaque);

    let degree = |v: &JetVar| -> i64 {
        if bracket_opaque.den_factors().iter().any(|(f, _)| f.contains_var(v)) {
            return i64::MAX;
        }
        bracket_opaque.num().int_exponents(v).and_then(|s| s.last().copied()).unwrap_or(i64::MAX)
    };
    let hd = [JetVar::new(hsym, [1, 0, 0]), JetVar::new(hsym, [0, 1, 0]), JetVar::new(hsym, [0, 0, 1])];
    let derivative_degrees = [degree(&hd[0]), degree(&hd[1]), degree(&hd[2])];
    let degree_in_h = degree(&hv);

    let rctx = Context::new().with_free(inv.over).with_max_order(max_order);
    let mut bind = BTreeMap::new();
    bind.insert(hv, h.clone());
    for (v, dir) in hd.iter().zip(Direction::ALL) {
        bind.insert(*v, rctx.total_derivative(h, dir)?);
    }
    let bracket = bracket_opaque.substitute_map(&bind)?;
    let target_r = target.substitute_map(&bind)?;
    let cofactor = if target_r.is_zero() { None } else { bracket.div_exact(&target_r) };
    let allowed = nonvanishing([&inv.u_t, &inv.u_y, h, &target_r]);
    let unit = match &cofactor {
        Some(c) => !bracket.is_zero() && is_unit_cofactor(c, &allowed),
        None => false,
    };
    Ok(ThirdOrder {
        bracket_opaque,
        formula_agrees,
        derivative_degrees,
        degree_in_h,
        bracket,
        target: target_r,
        cofactor,
        unit,
    })
}

/// Residual of `target` written for the pseudopotential of `c`, reduced on the covering.
pub fn check_auto_backlund(c: &Covering, target: &Equation, max_order: u32) -> Result<RatExpr> {
    let ctx = Context::new().with_base(&c.base).with_covering(c).with_max_order(max_order);
    let eq = target.rename_unknown(c.pseudo)?;
    ctx.realize(&eq.residual())
}
