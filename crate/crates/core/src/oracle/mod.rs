//! Exact evaluation at random rational points, used to confirm symbolic verdicts.

pub mod raw;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::ToString;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{KernelError, Result};
use crate::expr::{Expr, Node};
use crate::ratexpr::RatExpr;
use crate::symbol::JetVar;

pub const DEFAULT_POINTS: usize = 5;
pub const KAPPA_CHOICES: [i64; 3] = [1, 2, 3];
pub const SMOKE_KAPPA: f64 = 0.3;
pub const SMOKE_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SamplePoint {
    pub kappa: BigRational,
    pub values: BTreeMap<JetVar, BigRational>,
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn pow_exact(base: &BigRational, e: &BigRational) -> Result<BigRational> {
    let q = e.denom().to_u32().ok_or_else(|| KernelError::Evaluation("exponent denominator too large".to_string()))?;
    let p = e.numer().to_i32().ok_or_else(|| KernelError::Evaluation("exponent too large".to_string()))?;
    if base.is_zero() {
        return if p > 0 { Ok(BigRational::zero()) } else { Err(KernelError::DivisionByZero) };
    }
    let root = if q == 1 {
        base.clone()
    } else {
        if base.is_negative() {
            return Err(KernelError::FractionalPowerOfNegative);
        }
        let n = base.numer().nth_root(q);
        let d = base.denom().nth_root(q);
        if num_traits::pow(n.clone(), q as usize) != *base.numer() || num_traits::pow(d.clone(), q as usize) != *base.denom() {
            return Err(KernelError::Evaluation("inexact fractional power".to_string()));
        }
        BigRational::new(n, d)
    };
    Ok(if p >= 0 {
        num_traits::pow(root, p as usize)
    } else {
        num_traits::pow(root.recip(), (-p) as usize)
    })
}

/// Exact value of a raw tree.
pub fn eval_exact(e: &Expr, p: &SamplePoint) -> Result<BigRational> {
    let mut memo = BTreeMap::new();
    eval_rec(e, p, &mut memo)
}

fn eval_rec(e: &Expr, p: &SamplePoint, memo: &mut BTreeMap<usize, BigRational>) -> Result<BigRational> {
    if let Some(v) = memo.get(&e.id()) {
        return Ok(v.clone());
    }
    let v = match e.node() {
        Node::Num(r) => r.clone(),
        Node::Kappa => p.kappa.clone(),
        Node::Var(v) => p
            .values
            .get(v)
            .cloned()
            .ok_or_else(|| KernelError::Evaluation(alloc::format!("no value for {}", v.render())))?,
        Node::Add(xs) => {
            let mut acc = BigRational::zero();
            for x in xs {
                acc += eval_rec(x, p, memo)?;
            }
            acc
        }
        Node::Mul(xs) => {
            let mut acc = BigRational::one();
            for x in xs {
                acc *= eval_rec(x, p, memo)?;
            }
            acc
        }
        Node::Neg(a) => -eval_rec(a, p, memo)?,
        Node::Div(a, b) => {
            let d = eval_rec(b, p, memo)?;
            if d.is_zero() {
                return Err(KernelError::DivisionByZero);
            }
            eval_rec(a, p, memo)? / d
        }
        Node::Pow(a, b) => {
            let ex = eval_rec(b, p, memo)?;
            pow_exact(&eval_rec(a, p, memo)?, &ex)?
        }
    };
    memo.insert(e.id(), v.clone());
    Ok(v)
}

/// Exact value of a normalized expression, term by term.
pub fn eval_rat(r: &RatExpr, p: &SamplePoint) -> Result<BigRational> {
    let poly = |q: &crate::poly::PolyExpr| -> Result<BigRational> {
        let mut acc = BigRational::zero();
        for (m, c) in q.terms() {
            let mut t = c.eval(&p.kappa).ok_or(KernelError::DivisionByZero)?;
            for (v, e) in m.vars() {
                let x = p
                    .values
                    .get(v)
                    .ok_or_else(|| KernelError::Evaluation(alloc::format!("no value for {}", v.render())))?;
                t *= pow_exact(x, &e.eval(&p.kappa))?;
            }
            acc += t;
        }
        Ok(acc)
    };
    let mut den = BigRational::one();
    for (f, e) in r.den_factors() {
        den *= num_traits::pow(poly(f)?, *e as usize);
    }
    if den.is_zero() {
        return Err(KernelError::DivisionByZero);
    }
    Ok(poly(r.num())? / den)
}

/// Float value plus the largest magnitude seen at any node.
pub fn eval_f64(e: &Expr, kappa: f64, values: &BTreeMap<JetVar, f64>) -> Result<(f64, f64)> {
    let mut memo = BTreeMap::new();
    let mut scale = 0.0f64;
    let v = eval_f64_rec(e, kappa, values, &mut memo, &mut scale)?;
    Ok((v, scale))
}

fn eval_f64_rec(
    e: &Expr,
    kappa: f64,
    values: &BTreeMap<JetVar, f64>,
    memo: &mut BTreeMap<usize, f64>,
    scale: &mut f64,
) -> Result<f64> {
    if let Some(v) = memo.get(&e.id()) {
        return Ok(*v);
    }
    let v = match e.node() {
        Node::Num(r) => r.to_f64().unwrap_or(f64::NAN),
        Node::Kappa => kappa,
        Node::Var(v) => *values
            .get(v)
            .ok_or_else(|| KernelError::Evaluation(alloc::format!("no value for {}", v.render())))?,
        Node::Add(xs) => {
            let mut acc = 0.0;
            for x in xs {
                acc += eval_f64_rec(x, kappa, values, memo, scale)?;
            }
            acc
        }
        Node::Mul(xs) => {
            let mut acc = 1.0;
            for x in xs {
                acc *= eval_f64_rec(x, kappa, values, memo, scale)?;
            }
            acc
        }
        Node::Neg(a) => -eval_f64_rec(a, kappa, values, memo, scale)?,
        Node::Div(a, b) => eval_f64_rec(a, kappa, values, memo, scale)? / eval_f64_rec(b, kappa, values, memo, scale)?,
        Node::Pow(a, b) => {
            let x = eval_f64_rec(a, kappa, values, memo, scale)?;
            let y = eval_f64_rec(b, kappa, values, memo, scale)?;
            libm::pow(x, y)
        }
    };
    if v.is_finite() {
        *scale = scale.max(libm::fabs(v));
    }
    memo.insert(e.id(), v);
    Ok(v)
}

/// Stable 64-bit seed for a named check under a suite seed.
pub fn seed_for(suite_seed: u64, name: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut z = suite_seed ^ h;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub struct Sampler {
    rng: ChaCha8Rng,
    kappas: Vec<i64>,
}

impl Sampler {
    pub fn new(seed: u64, excluded: &[BigRational]) -> Self {
        let kappas = KAPPA_CHOICES.iter().copied().filter(|k| !excluded.contains(&int(*k))).collect();
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed), kappas }
    }

    fn below(&mut self, n: u64) -> u64 {
        self.rng.next_u64() % n
    }

    /// p/q with p in [-9, 9] \ {0} (or [1, 9] when positive) and q in [1, 4].
    pub fn value(&mut self, positive: bool) -> BigRational {
        let p = if positive { 1 + self.below(9) as i64 } else {
            let k = self.below(18) as i64;
            if k < 9 { k - 9 } else { k - 8 }
        };
        let q = 1 + self.below(4) as i64;
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    pub fn point(&mut self, vars: &BTreeSet<JetVar>, positive: &BTreeSet<JetVar>) -> SamplePoint {
        let i = self.below(self.kappas.len() as u64) as usize;
        let kappa = int(self.kappas[i]);
        let values = vars.iter().map(|v| (*v, self.value(positive.contains(v)))).collect();
        SamplePoint { kappa, values }
    }

    pub fn float_point(&mut self, vars: &BTreeSet<JetVar>) -> BTreeMap<JetVar, f64> {
        vars.iter().map(|v| (*v, self.value(true).to_f64().unwrap_or(1.0))).collect()
    }
}

/// Variables raised somewhere to a power that can be non-integral.
pub fn fractional_vars_rat(r: &RatExpr) -> BTreeSet<JetVar> {
    let mut out = BTreeSet::new();
    let polys = core::iter::once(r.num()).chain(r.den_factors().iter().map(|(f, _)| f));
    for p in polys {
        for (m, _) in p.terms() {
            for (v, e) in m.vars() {
                if e.is_fractional() {
                    out.insert(*v);
                }
            }
        }
    }
    out
}

pub fn fractional_vars_raw(e: &Expr) -> BTreeSet<JetVar> {
    let mut out = BTreeSet::new();
    let mut seen = BTreeSet::new();
    let mut stack = alloc::vec![e.clone()];
    while let Some(e) = stack.pop() {
        if !seen.insert(e.id()) {
            continue;
        }
        match e.node() {
            Node::Pow(a, b) => {
                if let Node::Var(v) = a.node() {
                    let integral = b.as_num().is_some_and(|r| r.is_integer());
                    if !integral {
                        out.insert(*v);
                    }
                }
                stack.push(a.clone());
                stack.push(b.clone());
            }
            Node::Add(xs) | Node::Mul(xs) => stack.extend(xs.iter().cloned()),
            Node::Neg(a) => stack.push(a.clone()),
            Node::Div(a, b) => {
                stack.push(a.clone());
                stack.push(b.clone());
            }
            _ => {}
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    ZeroConfirmed,
    Nonzero,
    /// The two evaluation routes disagree at some point.
    Disagreement,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::ZeroConfirmed => "ZERO-CONFIRMED",
            Verdict::Nonzero => "NONZERO",
            Verdict::Disagreement => "ENGINE-DISAGREEMENT",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub point: SamplePoint,
    pub normalized: Option<BigRational>,
    pub source: Option<BigRational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleReport {
    pub verdict: Verdict,
    pub points: usize,
    pub rejected: usize,
    pub witness: Option<Witness>,
}

/// What to evaluate: the normalized expression and, when available, the unnormalized source.
pub struct Probe<'a> {
    pub normalized: Option<&'a RatExpr>,
    pub source: Option<&'a Expr>,
    pub nonvanishing: &'a [Expr],
    pub excluded: &'a [BigRational],
}

const MAX_REJECTIONS: usize = 200;

pub fn confirm(probe: &Probe<'_>, points: usize, seed: u64) -> Result<OracleReport> {
    let mut vars = BTreeSet::new();
    let mut positive = BTreeSet::new();
    if let Some(r) = probe.normalized {
        vars.extend(r.vars());
        positive.extend(fractional_vars_rat(r));
    }
    if let Some(e) = probe.source {
        vars.extend(e.vars());
        positive.extend(fractional_vars_raw(e));
    }
    for e in probe.nonvanishing {
        vars.extend(e.vars());
        positive.extend(fractional_vars_raw(e));
    }
    let mut sampler = Sampler::new(seed, probe.excluded);
    if sampler.kappas.is_empty() {
        return Err(KernelError::Evaluation("every sample kappa is excluded".to_string()));
    }
    let mut report = OracleReport { verdict: Verdict::ZeroConfirmed, points: 0, rejected: 0, witness: None };
    while report.points < points {
        if report.rejected > MAX_REJECTIONS {
            return Err(KernelError::SamplingExhausted);
        }
        let p = sampler.point(&vars, &positive);
        let admissible = probe
            .nonvanishing
            .iter()
            .all(|e| eval_exact(e, &p).map(|v| !v.is_zero()).unwrap_or(false));
        if !admissible {
            report.rejected += 1;
            continue;
        }
        let n = probe.normalized.map(|r| eval_rat(r, &p)).transpose();
        let s = probe.source.map(|e| eval_exact(e, &p)).transpose();
        let (n, s) = match (n, s) {
            (Ok(n), Ok(s)) => (n, s),
            (Err(KernelError::DivisionByZero), _) | (_, Err(KernelError::DivisionByZero)) => {
                report.rejected += 1;
                continue;
            }
            (Err(e), _) | (_, Err(e)) => return Err(e),
        };
        report.points += 1;
        let nz = n.as_ref().is_some_and(|v| !v.is_zero());
        let sz = s.as_ref().is_some_and(|v| !v.is_zero());
        let disagree = matches!((&n, &s), (Some(a), Some(b)) if a != b);
        if disagree {
            report.verdict = Verdict::Disagreement;
            report.witness = Some(Witness { point: p, normalized: n, source: s });
            return Ok(report);
        }
        if (nz || sz) && report.verdict == Verdict::ZeroConfirmed {
            report.verdict = Verdict::Nonzero;
            report.witness = Some(Witness { point: p, normalized: n, source: s });
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SmokeReport {
    pub kappa: f64,
    pub value: f64,
    pub scale: f64,
    pub pass: bool,
}

/// Floating-point evaluation of a residual source at kappa = 0.3, positive jet values.
pub fn float_smoke(source: &Expr, seed: u64) -> Result<SmokeReport> {
    let mut sampler = Sampler::new(seed, &[]);
    let vals = sampler.float_point(&source.vars());
    let (value, scale) = eval_f64(source, SMOKE_KAPPA, &vals)?;
    let pass = value.is_finite() && libm::fabs(value) <= SMOKE_TOLERANCE * scale.max(1.0);
    Ok(SmokeReport { kappa: SMOKE_KAPPA, value, scale, pass })
}
