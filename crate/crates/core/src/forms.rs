//! Differential forms over the internal coordinates of a context.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::error::{KernelError, Result};
use crate::jet::Context;
use crate::linear::{solve_linear, Solution};
use crate::ratexpr::RatExpr;
use crate::symbol::{Direction, JetVar, Symbol};

pub const MAX_DEGREE: usize = 3;

/// dt, dx, dy, or d of a jet variable.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub enum Differential {
    Coord(Direction),
    Jet(JetVar),
}

impl Differential {
    fn key(&self) -> (u8, Option<Symbol>, u32, [u8; 3]) {
        match self {
            Differential::Coord(d) => (0, None, 0, [d.index() as u8, 0, 0]),
            Differential::Jet(v) => (1, Some(v.sym), v.order(), [255 - v.ord[0], 255 - v.ord[1], 255 - v.ord[2]]),
        }
    }

    pub fn render(&self) -> alloc::string::String {
        match self {
            Differential::Coord(d) => alloc::format!("d({})", d.letter()),
            Differential::Jet(v) => alloc::format!("d({})", v.render()),
        }
    }
}

impl PartialOrd for Differential {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// dt < dx < dy < du < du_t < du_x < du_y < du_tt < du_tx < du_ty < du_xx < ...
impl Ord for Differential {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl fmt::Debug for Differential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Sum of coefficient * (d_1 ^ ... ^ d_k) with strictly increasing keys.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Form {
    degree: usize,
    terms: BTreeMap<Vec<Differential>, RatExpr>,
}

impl Form {
    pub fn zero(degree: usize) -> Self {
        Form { degree, terms: BTreeMap::new() }
    }

    pub fn scalar(c: RatExpr) -> Self {
        let mut f = Self::zero(0);
        if !c.is_zero() {
            f.terms.insert(Vec::new(), c);
        }
        f
    }

    pub fn differential(d: Differential) -> Self {
        let mut f = Self::zero(1);
        f.terms.insert(alloc::vec![d], RatExpr::one());
        f
    }

    /// Single basis element with a coefficient; the differentials are sorted with sign.
    pub fn basis(mut ds: Vec<Differential>, c: RatExpr) -> Result<Self> {
        if ds.len() > MAX_DEGREE {
            return Err(KernelError::DegreeOverflow);
        }
        let mut f = Self::zero(ds.len());
        let Some(sign) = sort_with_sign(&mut ds) else {
            return Ok(f);
        };
        if !c.is_zero() {
            f.terms.insert(ds, if sign { c } else { c.neg() });
        }
        Ok(f)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &BTreeMap<Vec<Differential>, RatExpr> {
        &self.terms
    }

    pub fn coefficient(&self, key: &[Differential]) -> RatExpr {
        self.terms.get(key).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        if self.degree != o.degree && !self.is_zero() && !o.is_zero() {
            return Err(KernelError::Evaluation(alloc::format!(
                "cannot add forms of degree {} and {}",
                self.degree,
                o.degree
            )));
        }
        let degree = if self.is_zero() { o.degree } else { self.degree };
        let mut terms = self.terms.clone();
        for (k, c) in &o.terms {
            let s = match terms.get(k) {
                Some(a) => a.add(c),
                None => c.clone(),
            };
            if s.is_zero() {
                terms.remove(k);
            } else {
                terms.insert(k.clone(), s);
            }
        }
        Ok(Form { degree, terms })
    }

    pub fn neg(&self) -> Self {
        Form { degree: self.degree, terms: self.terms.iter().map(|(k, c)| (k.clone(), c.neg())).collect() }
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }

    pub fn scale(&self, s: &RatExpr) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(k, c)| (k.clone(), c.mul(s)))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        Form { degree: self.degree, terms }
    }

    pub fn map_coeffs(&self, mut f: impl FnMut(&RatExpr) -> Result<RatExpr>) -> Result<Self> {
        let mut terms = BTreeMap::new();
        for (k, c) in &self.terms {
            let n = f(c)?;
            if !n.is_zero() {
                terms.insert(k.clone(), n);
            }
        }
        Ok(Form { degree: self.degree, terms })
    }

    /// Reduce every coefficient to internal coordinates.
    pub fn realize(&self, ctx: &Context) -> Result<Self> {
        self.map_coeffs(|c| ctx.realize(c))
    }
}

/// Sort in place; Some(true) for an even permutation, None on a repeated element.
fn sort_with_sign(ds: &mut [Differential]) -> Option<bool> {
    let mut even = true;
    for i in 1..ds.len() {
        let mut j = i;
        while j > 0 && ds[j - 1] > ds[j] {
            ds.swap(j - 1, j);
            even = !even;
            j -= 1;
        }
    }
    if ds.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some(even)
}

pub fn wedge(a: &Form, b: &Form) -> Result<Form> {
    let degree = a.degree + b.degree;
    if degree > MAX_DEGREE {
        return Err(KernelError::DegreeOverflow);
    }
    let mut out = Form::zero(degree);
    for (ka, ca) in &a.terms {
        for (kb, cb) in &b.terms {
            if ka.iter().any(|d| kb.contains(d)) {
                continue;
            }
            let inversions = ka.iter().map(|x| kb.iter().filter(|y| x > y).count()).sum::<usize>();
            let mut key: Vec<Differential> = ka.iter().chain(kb.iter()).copied().collect();
            key.sort();
            let c = ca.mul(cb);
            let c = if inversions % 2 == 0 { c } else { c.neg() };
            let mut t = Form::zero(degree);
            t.terms.insert(key, c);
            out = out.add(&t)?;
        }
    }
    Ok(out)
}

/// Exterior derivative. Coefficients are reduced first, then differentiated in every
/// internal coordinate they contain; t, x, y never appear in coefficients.
pub fn exterior_d(a: &Form, ctx: &Context) -> Result<Form> {
    if a.degree + 1 > MAX_DEGREE {
        return Err(KernelError::DegreeOverflow);
    }
    let a = a.realize(ctx)?;
    let mut out = Form::zero(a.degree + 1);
    for (k, c) in &a.terms {
        for v in c.vars() {
            if !ctx.is_internal(&v)? {
                return Err(KernelError::NotInternal(v.render()));
            }
            let dc = c.partial(&v);
            if dc.is_zero() {
                continue;
            }
            let mut key = alloc::vec![Differential::Jet(v)];
            key.extend(k.iter().copied());
            out = out.add(&Form::basis(key, dc)?)?;
        }
    }
    Ok(out)
}

/// d(lhs) - rhs on the solution manifold of the context's base equation.
pub fn verify_structure(lhs: &Form, rhs: &Form, ctx: &Context) -> Result<Form> {
    if rhs.degree != 2 && !rhs.is_zero() {
        return Err(KernelError::Evaluation(alloc::format!("right-hand side has degree {}", rhs.degree)));
    }
    let dl = exterior_d(lhs, ctx)?;
    dl.sub(&rhs.realize(ctx)?)
}

/// Solve for unknown coefficient symbols appearing linearly in a residual form so that it vanishes.
pub fn solve_coefficients(residual: &Form, unknowns: &[JetVar]) -> Result<Solution> {
    let eqs: Vec<RatExpr> = residual.terms.values().cloned().collect();
    solve_linear(&eqs, unknowns)
}
