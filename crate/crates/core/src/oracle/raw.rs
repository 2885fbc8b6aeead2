//! Unsimplified differentiation on raw trees. Shares nothing with the canonical kernel
//! except the tree type, so it can cross-check kernel results numerically.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::ToString;
use alloc::vec::Vec;
use core::cell::RefCell;

use crate::error::{KernelError, Result};
use crate::expr::{Expr, Node};
use crate::forms::Differential;
use crate::symbol::{Direction, JetVar, Symbol};

pub fn zero() -> Expr {
    Expr::int(0)
}

pub fn one() -> Expr {
    Expr::int(1)
}

pub fn add(items: Vec<Expr>) -> Expr {
    let mut keep: Vec<Expr> = items.into_iter().filter(|e| !e.is_zero()).collect();
    match keep.len() {
        0 => zero(),
        1 => keep.pop().unwrap(),
        _ => Expr::add(keep),
    }
}

pub fn mul(items: Vec<Expr>) -> Expr {
    if items.iter().any(|e| e.is_zero()) {
        return zero();
    }
    let mut keep: Vec<Expr> = items.into_iter().filter(|e| !e.is_one()).collect();
    match keep.len() {
        0 => one(),
        1 => keep.pop().unwrap(),
        _ => Expr::mul(keep),
    }
}

pub fn neg(e: Expr) -> Expr {
    if e.is_zero() {
        e
    } else {
        Expr::neg(e)
    }
}

pub fn sub(a: Expr, b: Expr) -> Expr {
    add(alloc::vec![a, neg(b)])
}

/// Partial derivatives memoized per node and variable. Entries hold the node itself
/// so that its address cannot be reused while the memo is alive.
#[derive(Default)]
pub struct Differ {
    memo: BTreeMap<(usize, JetVar), (Expr, Expr)>,
    vars: BTreeMap<usize, (Expr, BTreeSet<JetVar>)>,
}

impl Differ {
    fn var_set(&mut self, e: &Expr) -> BTreeSet<JetVar> {
        if let Some((_, s)) = self.vars.get(&e.id()) {
            return s.clone();
        }
        let s = match e.node() {
            Node::Num(_) | Node::Kappa => BTreeSet::new(),
            Node::Var(v) => BTreeSet::from([*v]),
            Node::Add(xs) | Node::Mul(xs) => {
                let mut s = BTreeSet::new();
                for x in xs {
                    s.extend(self.var_set(x));
                }
                s
            }
            Node::Neg(a) => self.var_set(a),
            Node::Div(a, b) | Node::Pow(a, b) => {
                let mut s = self.var_set(a);
                s.extend(self.var_set(b));
                s
            }
        };
        self.vars.insert(e.id(), (e.clone(), s.clone()));
        s
    }

    fn contains(&mut self, e: &Expr, v: &JetVar) -> bool {
        self.var_set(e).contains(v)
    }

    pub fn partial(&mut self, e: &Expr, v: &JetVar) -> Result<Expr> {
        if !self.contains(e, v) {
            return Ok(zero());
        }
        if let Some((_, r)) = self.memo.get(&(e.id(), *v)) {
            return Ok(r.clone());
        }
        let r = match e.node() {
            Node::Num(_) | Node::Kappa => zero(),
            Node::Var(w) => {
                if w == v {
                    one()
                } else {
                    zero()
                }
            }
            Node::Add(xs) => {
                let mut parts = Vec::new();
                for x in xs {
                    parts.push(self.partial(x, v)?);
                }
                add(parts)
            }
            Node::Mul(xs) => {
                let mut parts = Vec::new();
                for (i, x) in xs.iter().enumerate() {
                    let dx = self.partial(x, v)?;
                    if dx.is_zero() {
                        continue;
                    }
                    let mut f: Vec<Expr> = xs.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, y)| y.clone()).collect();
                    f.push(dx);
                    parts.push(mul(f));
                }
                add(parts)
            }
            Node::Neg(a) => neg(self.partial(a, v)?),
            Node::Div(a, b) => {
                let da = self.partial(a, v)?;
                let db = self.partial(b, v)?;
                let first = if da.is_zero() { zero() } else { Expr::div(da, b.clone()) };
                let second = if db.is_zero() {
                    zero()
                } else {
                    Expr::div(mul(alloc::vec![a.clone(), db]), Expr::pow(b.clone(), Expr::int(2)))
                };
                sub(first, second)
            }
            Node::Pow(a, b) => {
                if !self.var_set(b).is_empty() {
                    return Err(KernelError::NonAffineExponent("exponent depends on jet variables".to_string()));
                }
                let da = self.partial(a, v)?;
                mul(alloc::vec![b.clone(), Expr::pow(a.clone(), sub(b.clone(), one())), da])
            }
        };
        self.memo.insert((e.id(), *v), (e.clone(), r.clone()));
        Ok(r)
    }
}

/// Raw twin of the kernel context. Reductions peel directions in a different order
/// from the kernel, so agreement also exercises commutativity on the manifold.
pub struct RawContext {
    base: Option<(JetVar, Expr)>,
    pseudos: Vec<(Symbol, Expr, Expr)>,
    free: BTreeSet<Symbol>,
    memo: RefCell<BTreeMap<JetVar, Expr>>,
    differ: RefCell<Differ>,
    max_order: u32,
}

impl Default for RawContext {
    fn default() -> Self {
        RawContext {
            base: None,
            pseudos: Vec::new(),
            free: BTreeSet::new(),
            memo: RefCell::new(BTreeMap::new()),
            differ: RefCell::new(Differ::default()),
            max_order: crate::jet::DEFAULT_MAX_ORDER,
        }
    }
}

impl RawContext {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_base(mut self, principal: JetVar, rhs: Expr) -> Self {
        self.base = Some((principal, rhs));
        self
    }

    pub fn with_pseudo(mut self, sym: Symbol, f_t: Expr, f_y: Expr) -> Self {
        self.pseudos.push((sym, f_t, f_y));
        self
    }

    pub fn with_free(mut self, sym: Symbol) -> Self {
        self.free.insert(sym);
        self
    }

    pub fn with_max_order(mut self, k: u32) -> Self {
        self.max_order = k;
        self
    }

    fn internal(&self, v: &JetVar) -> Result<bool> {
        if let Some((p, _)) = &self.base {
            if p.sym == v.sym {
                return Ok(!v.is_derivative_of(p));
            }
        }
        if self.pseudos.iter().any(|(s, _, _)| *s == v.sym) {
            return Ok(v.ord[0] == 0 && v.ord[2] == 0);
        }
        if self.free.contains(&v.sym) {
            return Ok(true);
        }
        Err(KernelError::UnclassifiedSymbol(v.sym.name().to_string()))
    }

    pub fn reduce(&self, v: &JetVar) -> Result<Expr> {
        if v.order() > self.max_order {
            return Err(KernelError::OrderLimit { order: v.order(), limit: self.max_order });
        }
        if self.internal(v)? {
            return Ok(Expr::var(*v));
        }
        if let Some(r) = self.memo.borrow().get(v) {
            return Ok(r.clone());
        }
        let r = if let Some((p, rhs)) = self.base.as_ref().filter(|(p, _)| p.sym == v.sym) {
            if v == p {
                self.realize(rhs)?
            } else {
                let d = [Direction::T, Direction::Y, Direction::X]
                    .into_iter()
                    .find(|d| v.ord[d.index()] > p.ord[d.index()])
                    .unwrap();
                let lower = self.reduce(&v.lowered(d).unwrap())?;
                self.total_derivative(&lower, d)?
            }
        } else {
            let (_, f_t, f_y) = self.pseudos.iter().find(|(s, _, _)| *s == v.sym).unwrap();
            let [a, b, c] = v.ord;
            if (a, b, c) == (1, 0, 0) {
                self.realize(f_t)?
            } else if (a, b, c) == (0, 0, 1) {
                self.realize(f_y)?
            } else {
                let d = if c > 0 && !(a == 0 && c == 1) {
                    Direction::Y
                } else if c == 0 && a > 1 {
                    Direction::T
                } else {
                    Direction::X
                };
                let lower = self.reduce(&v.lowered(d).unwrap())?;
                self.total_derivative(&lower, d)?
            }
        };
        self.memo.borrow_mut().insert(*v, r.clone());
        Ok(r)
    }

    pub fn realize(&self, e: &Expr) -> Result<Expr> {
        let mut map = BTreeMap::new();
        for v in e.vars() {
            if !self.internal(&v)? {
                map.insert(v, self.reduce(&v)?);
            }
        }
        if map.is_empty() {
            return Ok(e.clone());
        }
        Ok(e.substitute(&|v| map.get(v).cloned()))
    }

    pub fn partial(&self, e: &Expr, v: &JetVar) -> Result<Expr> {
        self.differ.borrow_mut().partial(e, v)
    }

    pub fn total_derivative(&self, e: &Expr, d: Direction) -> Result<Expr> {
        let e = self.realize(e)?;
        let mut parts = Vec::new();
        for v in e.vars() {
            let dv = self.partial(&e, &v)?;
            if dv.is_zero() {
                continue;
            }
            parts.push(mul(alloc::vec![dv, self.reduce(&v.shifted(d))?]));
        }
        Ok(add(parts))
    }
}

/// Form with raw coefficients, keyed by sorted differentials.
#[derive(Clone, Debug)]
pub struct RawForm {
    pub degree: usize,
    pub terms: BTreeMap<Vec<Differential>, Expr>,
}

impl RawForm {
    pub fn zero(degree: usize) -> Self {
        RawForm { degree, terms: BTreeMap::new() }
    }

    pub fn differential(d: Differential) -> Self {
        let mut f = Self::zero(1);
        f.terms.insert(alloc::vec![d], one());
        f
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        if self.degree != o.degree && !self.terms.is_empty() && !o.terms.is_empty() {
            return Err(KernelError::Evaluation("cannot add forms of different degree".to_string()));
        }
        let degree = if self.terms.is_empty() { o.degree } else { self.degree };
        let mut terms = self.terms.clone();
        for (k, c) in &o.terms {
            let s = match terms.get(k) {
                Some(a) => add(alloc::vec![a.clone(), c.clone()]),
                None => c.clone(),
            };
            terms.insert(k.clone(), s);
        }
        Ok(RawForm { degree, terms })
    }

    pub fn neg(&self) -> Self {
        RawForm { degree: self.degree, terms: self.terms.iter().map(|(k, c)| (k.clone(), neg(c.clone()))).collect() }
    }

    pub fn scale(&self, s: &Expr) -> Self {
        RawForm {
            degree: self.degree,
            terms: self.terms.iter().map(|(k, c)| (k.clone(), mul(alloc::vec![s.clone(), c.clone()]))).collect(),
        }
    }

    pub fn wedge(&self, o: &Self) -> Result<Self> {
        let degree = self.degree + o.degree;
        if degree > crate::forms::MAX_DEGREE {
            return Err(KernelError::DegreeOverflow);
        }
        let mut acc: BTreeMap<Vec<Differential>, Vec<Expr>> = BTreeMap::new();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &o.terms {
                let mut key: Vec<Differential> = ka.iter().chain(kb.iter()).copied().collect();
                let Some(even) = bubble_sign(&mut key) else { continue };
                let c = mul(alloc::vec![ca.clone(), cb.clone()]);
                acc.entry(key).or_default().push(if even { c } else { neg(c) });
            }
        }
        Ok(RawForm { degree, terms: acc.into_iter().map(|(k, v)| (k, add(v))).collect() })
    }

    pub fn realize(&self, ctx: &RawContext) -> Result<Self> {
        let mut terms = BTreeMap::new();
        for (k, c) in &self.terms {
            terms.insert(k.clone(), ctx.realize(c)?);
        }
        Ok(RawForm { degree: self.degree, terms })
    }

    pub fn exterior_d(&self, ctx: &RawContext) -> Result<Self> {
        let realized = self.realize(ctx)?;
        let mut out = RawForm::zero(self.degree + 1);
        for (k, c) in &realized.terms {
            for v in c.vars() {
                let dc = ctx.partial(c, &v)?;
                if dc.is_zero() {
                    continue;
                }
                let mut t = RawForm::zero(1);
                t.terms.insert(alloc::vec![Differential::Jet(v)], dc);
                let mut rest = RawForm::zero(self.degree);
                rest.terms.insert(k.clone(), one());
                out = out.add(&t.wedge(&rest)?)?;
            }
        }
        Ok(out)
    }
}

fn bubble_sign(ds: &mut [Differential]) -> Option<bool> {
    let mut even = true;
    let n = ds.len();
    for i in 0..n {
        for j in 0..n - 1 - i {
            if ds[j] == ds[j + 1] {
                return None;
            }
            if ds[j] > ds[j + 1] {
                ds.swap(j, j + 1);
                even = !even;
            }
        }
    }
    if ds.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some(even)
}
