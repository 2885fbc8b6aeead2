//! Fraction-free elimination for systems linear in a set of jet variables.

use alloc::vec::Vec;

use crate::error::{KernelError, Result};
use crate::kappa::KappaRational;
use crate::monomial::Monomial;
use crate::poly::PolyExpr;
use crate::ratexpr::RatExpr;
use crate::symbol::JetVar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub values: Vec<(JetVar, RatExpr)>,
    /// Pivots and equation denominators assumed nonzero.
    pub divisors: Vec<PolyExpr>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Inconsistency {
    /// Indices of the input equations whose reduced form is a nonzero constant row.
    pub rows: Vec<usize>,
}

/// Coefficients `a` and constant `b` with `eq = sum a_j x_j + b`, checking linearity.
pub fn linear_parts(eq: &RatExpr, unknowns: &[JetVar]) -> Result<(Vec<PolyExpr>, PolyExpr)> {
    for (f, _) in eq.den_factors() {
        if let Some(x) = unknowns.iter().find(|x| f.contains_var(x)) {
            return Err(KernelError::NonLinear(x.render()));
        }
    }
    let n = eq.num();
    let mut coeffs = Vec::with_capacity(unknowns.len());
    let mut rest = n.clone();
    for x in unknowns {
        let a = n.partial(x);
        if unknowns.iter().any(|y| a.contains_var(y)) {
            return Err(KernelError::NonLinear(x.render()));
        }
        rest = rest.sub(&a.mul(&PolyExpr::var(*x)));
        coeffs.push(a);
    }
    if let Some(x) = unknowns.iter().find(|x| rest.contains_var(x)) {
        return Err(KernelError::NonLinear(x.render()));
    }
    Ok((coeffs, rest))
}

fn strip_row_unit(row: &mut [PolyExpr]) {
    let nonzero: Vec<&PolyExpr> = row.iter().filter(|p| !p.is_zero()).collect();
    if nonzero.is_empty() {
        return;
    }
    let mut m: Option<Monomial> = None;
    for p in &nonzero {
        for (n, _) in p.terms() {
            m = Some(match m {
                None => n.clone(),
                Some(a) => a.meet(n),
            });
        }
    }
    let c = KappaRational::content_of(nonzero.iter().flat_map(|p| p.terms().iter().map(|(_, c)| c)));
    let (Some(m), Ok(ci)) = (m, c.inv()) else { return };
    let mi = m.inv();
    for p in row.iter_mut() {
        if !p.is_zero() {
            *p = p.mul_term(&mi, &ci);
        }
    }
}

/// Solve `eqs = 0` for `unknowns`. Overdetermined systems are accepted when consistent.
pub fn solve_linear(eqs: &[RatExpr], unknowns: &[JetVar]) -> Result<Solution> {
    solve_linear_detailed(eqs, unknowns).map_err(|e| match e {
        SolveError::Kernel(k) => k,
        SolveError::Inconsistent(_) => KernelError::Inconsistent,
    })
}

#[derive(Debug)]
pub enum SolveError {
    Kernel(KernelError),
    Inconsistent(Inconsistency),
}

impl From<KernelError> for SolveError {
    fn from(e: KernelError) -> Self {
        SolveError::Kernel(e)
    }
}

pub fn solve_linear_detailed(eqs: &[RatExpr], unknowns: &[JetVar]) -> core::result::Result<Solution, SolveError> {
    let n = unknowns.len();
    let mut divisors: Vec<PolyExpr> = Vec::new();
    let mut rows: Vec<(usize, Vec<PolyExpr>)> = Vec::new();
    for (i, e) in eqs.iter().enumerate() {
        for (f, _) in e.den_factors() {
            if !divisors.contains(f) {
                divisors.push(f.clone());
            }
        }
        let (a, b) = linear_parts(e, unknowns)?;
        let mut row = a;
        row.push(b.neg());
        if row.iter().all(|p| p.is_zero()) {
            continue;
        }
        strip_row_unit(&mut row);
        rows.push((i, row));
    }
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let best = (r..rows.len()).filter(|&i| !rows[i].1[c].is_zero()).min_by_key(|&i| {
            rows[i].1.iter().map(|p| p.len()).sum::<usize>()
        });
        let Some(p) = best else { continue };
        rows.swap(r, p);
        let piv = rows[r].1.clone();
        for (_, row) in rows.iter_mut().skip(r + 1) {
            let f = row[c].clone();
            if f.is_zero() {
                continue;
            }
            for j in 0..=n {
                row[j] = piv[c].mul(&row[j]).sub(&f.mul(&piv[j]));
            }
            strip_row_unit(row);
        }
        pivots.push(c);
        r += 1;
    }
    let bad: Vec<usize> = rows[r..].iter().filter(|(_, row)| !row[n].is_zero()).map(|(i, _)| *i).collect();
    if !bad.is_empty() {
        return Err(SolveError::Inconsistent(Inconsistency { rows: bad }));
    }
    if r < n {
        return Err(KernelError::Singular.into());
    }
    let mut values: Vec<Option<RatExpr>> = alloc::vec![None; n];
    for k in (0..r).rev() {
        let c = pivots[k];
        let row = &rows[k].1;
        let mut acc = RatExpr::from_poly(row[n].clone());
        for j in (c + 1)..n {
            if !row[j].is_zero() {
                acc = acc.sub(&RatExpr::from_poly(row[j].clone()).mul(values[j].as_ref().unwrap()));
            }
        }
        let (_, _, core) = row[c].split_unit();
        if !core.is_one() && !divisors.contains(&core) {
            divisors.push(core);
        }
        values[c] = Some(acc.div(&RatExpr::from_poly(row[c].clone()))?);
    }
    Ok(Solution {
        values: unknowns.iter().copied().zip(values.into_iter().map(|v| v.unwrap())).collect(),
        divisors,
    })
}
