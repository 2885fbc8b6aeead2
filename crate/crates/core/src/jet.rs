//! Total derivatives restricted to the solution manifold of an evolution-type equation.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cell::RefCell;

use num_rational::BigRational;

use crate::error::{KernelError, Result};
use crate::poly::PolyExpr;
use crate::ratexpr::RatExpr;
use crate::symbol::{Direction, JetVar, Symbol};

pub const DEFAULT_MAX_ORDER: u32 = 6;

/// `principal = rhs`, where `rhs` involves no derivative of `principal`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equation {
    pub name: String,
    pub principal: JetVar,
    pub rhs: RatExpr,
    pub excluded: Vec<BigRational>,
}

impl Equation {
    pub fn new(name: &str, principal: JetVar, rhs: RatExpr, excluded: Vec<BigRational>) -> Result<Self> {
        if let Some(v) = rhs.vars().into_iter().find(|v| v.is_derivative_of(&principal)) {
            return Err(KernelError::NotInternal(v.render()));
        }
        Ok(Equation { name: name.to_string(), principal, rhs, excluded })
    }

    pub fn unknown(&self) -> Symbol {
        self.principal.sym
    }

    /// principal - rhs
    pub fn residual(&self) -> RatExpr {
        RatExpr::var(self.principal).sub(&self.rhs)
    }

    pub fn is_internal(&self, v: &JetVar) -> bool {
        v.sym == self.unknown() && !v.is_derivative_of(&self.principal)
    }

    pub fn rename_unknown(&self, to: Symbol) -> Result<Self> {
        let from = self.unknown();
        let rhs = self.rhs.substitute(&|v| (v.sym == from).then(|| RatExpr::var(JetVar::new(to, v.ord))))?;
        Equation::new(&self.name, JetVar::new(to, self.principal.ord), rhs, self.excluded.clone())
    }

    /// Rational roots of the kappa-denominators appearing in the right-hand side.
    pub fn denominator_roots(&self) -> Vec<BigRational> {
        let mut out: Vec<BigRational> = Vec::new();
        let mut polys: Vec<&PolyExpr> = alloc::vec![self.rhs.num()];
        polys.extend(self.rhs.den_factors().iter().map(|(f, _)| f));
        for p in polys {
            for (_, c) in p.terms() {
                for r in c.den().rational_roots() {
                    if !out.contains(&r) {
                        out.push(r);
                    }
                }
            }
        }
        out.sort();
        out
    }

    /// Denominator roots not listed among the excluded kappa values.
    pub fn missing_exclusions(&self) -> Vec<BigRational> {
        self.denominator_roots().into_iter().filter(|r| !self.excluded.contains(r)).collect()
    }
}

/// Pseudopotential `pseudo` with `pseudo_t = f_t`, `pseudo_y = f_y` over `base`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Covering {
    pub name: String,
    pub base: Equation,
    pub pseudo: Symbol,
    pub f_t: RatExpr,
    pub f_y: RatExpr,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Base,
    Pseudo,
    Free,
}

#[derive(Clone, Debug)]
struct Pseudo {
    sym: Symbol,
    f_t: RatExpr,
    f_y: RatExpr,
}

/// Classification of every symbol in play plus a private memo of reductions.
/// Not shared between threads; each check builds its own.
#[derive(Debug)]
pub struct Context {
    base: Option<Equation>,
    pseudos: Vec<Pseudo>,
    free: BTreeSet<Symbol>,
    max_order: u32,
    memo: RefCell<BTreeMap<JetVar, RatExpr>>,
}

impl Default for Context {
    fn default() -> Self {
        Context {
            base: None,
            pseudos: Vec::new(),
            free: BTreeSet::new(),
            max_order: DEFAULT_MAX_ORDER,
            memo: RefCell::new(BTreeMap::new()),
        }
    }
}

impl Context {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_base(mut self, eq: &Equation) -> Self {
        self.base = Some(eq.clone());
        self
    }

    pub fn with_pseudo(mut self, sym: Symbol, f_t: RatExpr, f_y: RatExpr) -> Self {
        self.pseudos.push(Pseudo { sym, f_t, f_y });
        self
    }

    pub fn with_covering(self, c: &Covering) -> Self {
        self.with_pseudo(c.pseudo, c.f_t.clone(), c.f_y.clone())
    }

    pub fn with_free(mut self, sym: Symbol) -> Self {
        self.free.insert(sym);
        self
    }

    pub fn with_max_order(mut self, k: u32) -> Self {
        self.max_order = k;
        self
    }

    pub fn base(&self) -> Option<&Equation> {
        self.base.as_ref()
    }

    pub fn max_order(&self) -> u32 {
        self.max_order
    }

    pub fn role(&self, s: Symbol) -> Result<Role> {
        if self.base.as_ref().is_some_and(|b| b.unknown() == s) {
            Ok(Role::Base)
        } else if self.pseudos.iter().any(|p| p.sym == s) {
            Ok(Role::Pseudo)
        } else if self.free.contains(&s) {
            Ok(Role::Free)
        } else {
            Err(KernelError::UnclassifiedSymbol(s.name().to_string()))
        }
    }

    /// Whether `v` is one of the coordinates the context keeps as independent.
    pub fn is_internal(&self, v: &JetVar) -> Result<bool> {
        Ok(match self.role(v.sym)? {
            Role::Base => self.base.as_ref().unwrap().is_internal(v),
            Role::Pseudo => v.ord[0] == 0 && v.ord[2] == 0,
            Role::Free => true,
        })
    }

    /// Express a jet variable in internal coordinates.
    pub fn reduce(&self, v: &JetVar) -> Result<RatExpr> {
        if v.order() > self.max_order {
            return Err(KernelError::OrderLimit { order: v.order(), limit: self.max_order });
        }
        if let Some(r) = self.memo.borrow().get(v) {
            return Ok(r.clone());
        }
        let r = match self.role(v.sym)? {
            Role::Free => RatExpr::var(*v),
            Role::Base => {
                let eq = self.base.as_ref().unwrap();
                let p = eq.principal;
                if !v.is_derivative_of(&p) {
                    RatExpr::var(*v)
                } else if *v == p {
                    self.realize(&eq.rhs)?
                } else {
                    let excess = |d: Direction| v.ord[d.index()] > p.ord[d.index()];
                    let d = [Direction::X, Direction::T, Direction::Y].into_iter().find(|d| excess(*d)).unwrap();
                    let lower = self.reduce(&v.lowered(d).unwrap())?;
                    self.total_derivative(&lower, d)?
                }
            }
            Role::Pseudo => {
                let ps = self.pseudos.iter().find(|p| p.sym == v.sym).unwrap();
                let [a, b, c] = v.ord;
                if a == 0 && c == 0 {
                    RatExpr::var(*v)
                } else if b > 0 {
                    let lower = self.reduce(&v.lowered(Direction::X).unwrap())?;
                    self.total_derivative(&lower, Direction::X)?
                } else if (a, c) == (1, 0) {
                    self.realize(&ps.f_t)?
                } else if (a, c) == (0, 1) {
                    self.realize(&ps.f_y)?
                } else if a > 0 {
                    let lower = self.reduce(&v.lowered(Direction::T).unwrap())?;
                    self.total_derivative(&lower, Direction::T)?
                } else {
                    let lower = self.reduce(&v.lowered(Direction::Y).unwrap())?;
                    self.total_derivative(&lower, Direction::Y)?
                }
            }
        };
        self.memo.borrow_mut().insert(*v, r.clone());
        Ok(r)
    }

    /// Replace every non-internal jet variable by its reduction.
    pub fn realize(&self, e: &RatExpr) -> Result<RatExpr> {
        let mut map = BTreeMap::new();
        for v in e.vars() {
            if !self.is_internal(&v)? {
                map.insert(v, self.reduce(&v)?);
            }
        }
        if map.is_empty() {
            return Ok(e.clone());
        }
        e.substitute_map(&map)
    }

    fn total_derivative_poly(&self, p: &PolyExpr, d: Direction) -> Result<RatExpr> {
        let mut polys = Vec::new();
        let mut rest = RatExpr::zero();
        for v in p.vars() {
            let dv = self.reduce(&v.shifted(d))?;
            let dp = p.partial(&v);
            match dv.as_poly() {
                Some(q) => polys.push(dp.mul(q)),
                None => rest = rest.add(&RatExpr::from_poly(dp).mul(&dv)),
            }
        }
        Ok(RatExpr::from_poly(PolyExpr::sum(polys)).add(&rest))
    }

    /// Total derivative in direction `d`, on the solution manifold.
    pub fn total_derivative(&self, e: &RatExpr, d: Direction) -> Result<RatExpr> {
        let e = self.realize(e)?;
        let den = RatExpr::from_parts(PolyExpr::one(), e.den_factors())?;
        let mut acc = self.total_derivative_poly(e.num(), d)?.mul(&den);
        for (f, k) in e.den_factors() {
            let df = self.total_derivative_poly(f, d)?;
            if df.is_zero() {
                continue;
            }
            let term = RatExpr::from_poly(e.num().clone())
                .mul(&df)
                .mul(&den)
                .div(&RatExpr::from_poly(f.clone()))?
                .scale(&crate::kappa::KappaRational::from_int(-(*k as i64)));
            acc = acc.add(&term);
        }
        Ok(acc)
    }

    pub fn total_derivative_n(&self, e: &RatExpr, dirs: &[Direction]) -> Result<RatExpr> {
        let mut acc = e.clone();
        for d in dirs {
            acc = self.total_derivative(&acc, *d)?;
        }
        Ok(acc)
    }

    /// D_a D_b e - D_b D_a e.
    pub fn commutation_check(&self, e: &RatExpr, a: Direction, b: Direction) -> Result<RatExpr> {
        let ab = self.total_derivative(&self.total_derivative(e, b)?, a)?;
        let ba = self.total_derivative(&self.total_derivative(e, a)?, b)?;
        Ok(ab.sub(&ba))
    }
}
