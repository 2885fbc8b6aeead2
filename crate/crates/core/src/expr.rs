//! Raw expression trees as produced by the parser, and their normalization.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Zero};

use crate::error::{KernelError, Result};
use crate::exponent::Exponent;
use crate::kappa::{KPoly, KappaRational};
use crate::poly::PolyExpr;
use crate::ratexpr::RatExpr;
use crate::symbol::JetVar;

/// Shared, immutable expression node. Subtrees may be shared, so the tree is a DAG.
#[derive(Clone, Debug)]
pub struct Expr(Arc<Node>);

#[derive(Debug)]
pub enum Node {
    Num(BigRational),
    Kappa,
    Var(JetVar),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Neg(Expr),
    Div(Expr, Expr),
    Pow(Expr, Expr),
}

// Tree builders; operator traits would hide the allocation of a new node.
#[allow(clippy::should_implement_trait)]
impl Expr {
    pub fn new(n: Node) -> Self {
        Expr(Arc::new(n))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    /// Identity of the shared node, used as a memo key.
    pub fn id(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn int(n: i64) -> Self {
        Self::new(Node::Num(BigRational::from_integer(BigInt::from(n))))
    }

    pub fn rational(r: BigRational) -> Self {
        Self::new(Node::Num(r))
    }

    pub fn kappa() -> Self {
        Self::new(Node::Kappa)
    }

    pub fn var(v: JetVar) -> Self {
        Self::new(Node::Var(v))
    }

    pub fn add(items: Vec<Expr>) -> Self {
        Self::new(Node::Add(items))
    }

    pub fn mul(items: Vec<Expr>) -> Self {
        Self::new(Node::Mul(items))
    }

    pub fn neg(e: Expr) -> Self {
        Self::new(Node::Neg(e))
    }

    pub fn sub(a: Expr, b: Expr) -> Self {
        Self::add(alloc::vec![a, Self::neg(b)])
    }

    pub fn div(a: Expr, b: Expr) -> Self {
        Self::new(Node::Div(a, b))
    }

    pub fn pow(a: Expr, b: Expr) -> Self {
        Self::new(Node::Pow(a, b))
    }

    pub fn as_num(&self) -> Option<&BigRational> {
        match self.node() {
            Node::Num(r) => Some(r),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_num().is_some_and(|r| r.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.as_num().is_some_and(|r| r.is_one())
    }

    /// All jet variables in the DAG.
    pub fn vars(&self) -> BTreeSet<JetVar> {
        let mut seen = BTreeSet::new();
        let mut out = BTreeSet::new();
        let mut stack = alloc::vec![self.clone()];
        while let Some(e) = stack.pop() {
            if !seen.insert(e.id()) {
                continue;
            }
            match e.node() {
                Node::Var(v) => {
                    out.insert(*v);
                }
                Node::Num(_) | Node::Kappa => {}
                Node::Add(xs) | Node::Mul(xs) => stack.extend(xs.iter().cloned()),
                Node::Neg(a) => stack.push(a.clone()),
                Node::Div(a, b) | Node::Pow(a, b) => {
                    stack.push(a.clone());
                    stack.push(b.clone());
                }
            }
        }
        out
    }

    /// Number of distinct nodes.
    pub fn size(&self) -> usize {
        let mut seen = BTreeSet::new();
        let mut stack = alloc::vec![self.clone()];
        while let Some(e) = stack.pop() {
            if !seen.insert(e.id()) {
                continue;
            }
            match e.node() {
                Node::Add(xs) | Node::Mul(xs) => stack.extend(xs.iter().cloned()),
                Node::Neg(a) => stack.push(a.clone()),
                Node::Div(a, b) | Node::Pow(a, b) => {
                    stack.push(a.clone());
                    stack.push(b.clone());
                }
                _ => {}
            }
        }
        seen.len()
    }

    /// Replace variables by expressions, sharing the replaced subtrees.
    pub fn substitute(&self, bind: &dyn Fn(&JetVar) -> Option<Expr>) -> Expr {
        let mut memo = BTreeMap::new();
        subst_rec(self, bind, &mut memo)
    }
}

fn subst_rec(e: &Expr, bind: &dyn Fn(&JetVar) -> Option<Expr>, memo: &mut BTreeMap<usize, Expr>) -> Expr {
    if let Some(r) = memo.get(&e.id()) {
        return r.clone();
    }
    let r = match e.node() {
        Node::Var(v) => bind(v).unwrap_or_else(|| e.clone()),
        Node::Num(_) | Node::Kappa => e.clone(),
        Node::Add(xs) => Expr::add(xs.iter().map(|x| subst_rec(x, bind, memo)).collect()),
        Node::Mul(xs) => Expr::mul(xs.iter().map(|x| subst_rec(x, bind, memo)).collect()),
        Node::Neg(a) => Expr::neg(subst_rec(a, bind, memo)),
        Node::Div(a, b) => Expr::div(subst_rec(a, bind, memo), subst_rec(b, bind, memo)),
        Node::Pow(a, b) => Expr::pow(subst_rec(a, bind, memo), subst_rec(b, bind, memo)),
    };
    memo.insert(e.id(), r.clone());
    r
}

/// Bring a raw tree to canonical form.
pub fn normalize(e: &Expr) -> Result<RatExpr> {
    let mut memo = BTreeMap::new();
    norm_rec(e, &mut memo)
}

fn norm_rec(e: &Expr, memo: &mut BTreeMap<usize, RatExpr>) -> Result<RatExpr> {
    if let Some(r) = memo.get(&e.id()) {
        return Ok(r.clone());
    }
    let r = match e.node() {
        Node::Num(q) => RatExpr::constant(KappaRational::from_rational(q)),
        Node::Kappa => RatExpr::kappa(),
        Node::Var(v) => RatExpr::var(*v),
        Node::Add(xs) => {
            let mut acc = RatExpr::zero();
            for x in xs {
                acc = acc.add(&norm_rec(x, memo)?);
            }
            acc
        }
        Node::Mul(xs) => {
            let mut acc = RatExpr::one();
            for x in xs {
                acc = acc.mul(&norm_rec(x, memo)?);
            }
            acc
        }
        Node::Neg(a) => norm_rec(a, memo)?.neg(),
        Node::Div(a, b) => {
            let n = norm_rec(a, memo)?;
            let d = norm_denominator(b, memo)?;
            n.mul(&d)
        }
        Node::Pow(a, b) => {
            let ex = exponent_value(&norm_rec(b, memo)?)?;
            match ex.as_int() {
                Some(k) if k < 0 => norm_denominator(a, memo)?.pow(-k)?,
                _ => norm_rec(a, memo)?.pow_exponent(&ex)?,
            }
        }
    };
    memo.insert(e.id(), r.clone());
    Ok(r)
}

/// Reciprocal of a denominator tree, keeping products and integer powers of sums
/// as separate denominator factors so that normalization is idempotent on printed output.
fn norm_denominator(e: &Expr, memo: &mut BTreeMap<usize, RatExpr>) -> Result<RatExpr> {
    match e.node() {
        Node::Mul(xs) => {
            let mut acc = RatExpr::one();
            for x in xs {
                acc = acc.mul(&norm_denominator(x, memo)?);
            }
            Ok(acc)
        }
        Node::Pow(a, b) => {
            let ex = exponent_value(&norm_rec(b, memo)?)?;
            match ex.as_int() {
                Some(k) if k > 0 => norm_denominator(a, memo)?.pow(k),
                _ => norm_rec(e, memo)?.inv(),
            }
        }
        _ => norm_rec(e, memo)?.inv(),
    }
}

/// Interpret a normalized expression as a kappa-affine exponent.
pub fn exponent_value(r: &RatExpr) -> Result<Exponent> {
    let c = r.as_constant().ok_or_else(|| {
        KernelError::NonAffineExponent(alloc::string::String::from("exponent depends on jet variables"))
    })?;
    Exponent::from_kappa_rational(&c)
}

pub fn rational_to_raw(r: Rational64) -> Expr {
    Expr::rational(BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom())))
}

pub fn exponent_to_raw(e: &Exponent) -> Expr {
    if e.b.is_zero() {
        return rational_to_raw(e.a);
    }
    Expr::add(alloc::vec![rational_to_raw(e.a), Expr::mul(alloc::vec![rational_to_raw(e.b), Expr::kappa()])])
}

pub fn kpoly_to_raw(p: &KPoly) -> Expr {
    let mut terms = Vec::new();
    for (i, c) in p.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let k = Expr::rational(BigRational::from_integer(c.clone()));
        terms.push(match i {
            0 => k,
            _ => Expr::mul(alloc::vec![k, Expr::pow(Expr::kappa(), Expr::int(i as i64))]),
        });
    }
    Expr::add(terms)
}

pub fn kappa_rational_to_raw(k: &KappaRational) -> Expr {
    if k.den().is_one() {
        kpoly_to_raw(k.num())
    } else {
        Expr::div(kpoly_to_raw(k.num()), kpoly_to_raw(k.den()))
    }
}

pub fn poly_to_raw(p: &PolyExpr) -> Expr {
    let mut terms = Vec::with_capacity(p.len());
    for (m, c) in p.terms() {
        let mut f = alloc::vec![kappa_rational_to_raw(c)];
        for (v, e) in m.vars() {
            f.push(if e.is_one() { Expr::var(*v) } else { Expr::pow(Expr::var(*v), exponent_to_raw(e)) });
        }
        terms.push(Expr::mul(f));
    }
    Expr::add(terms)
}

/// Raw tree denoting the same value; the oracle evaluates it without the kernel.
pub fn to_raw(r: &RatExpr) -> Expr {
    let n = poly_to_raw(r.num());
    if r.den_factors().is_empty() {
        return n;
    }
    let d = r
        .den_factors()
        .iter()
        .map(|(f, e)| if *e == 1 { poly_to_raw(f) } else { Expr::pow(poly_to_raw(f), Expr::int(*e as i64)) })
        .collect();
    Expr::div(n, Expr::mul(d))
}
