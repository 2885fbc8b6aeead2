use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_rational::BigRational;

use crate::error::{KernelError, Result};
use crate::exponent::Exponent;
use crate::kappa::KappaRational;
use crate::monomial::Monomial;
use crate::poly::PolyExpr;
use crate::symbol::JetVar;

/// Quotient num / den. The denominator is kept as a product of normalized
/// multi-term factors with multiplicities; monomial and kappa-rational units
/// are always absorbed into the numerator.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct RatExpr {
    num: PolyExpr,
    den: Vec<(PolyExpr, u32)>,
}

fn merge_max(a: &[(PolyExpr, u32)], b: &[(PolyExpr, u32)]) -> Vec<(PolyExpr, u32)> {
    let mut m: BTreeMap<&PolyExpr, u32> = BTreeMap::new();
    for (f, e) in a.iter().chain(b) {
        let x = m.entry(f).or_insert(0);
        *x = (*x).max(*e);
    }
    m.into_iter().map(|(f, e)| (f.clone(), e)).collect()
}

fn merge_sum(a: &[(PolyExpr, u32)], b: &[(PolyExpr, u32)]) -> Vec<(PolyExpr, u32)> {
    let mut m: BTreeMap<&PolyExpr, u32> = BTreeMap::new();
    for (f, e) in a.iter().chain(b) {
        *m.entry(f).or_insert(0) += *e;
    }
    m.into_iter().map(|(f, e)| (f.clone(), e)).collect()
}

fn exponent_of(den: &[(PolyExpr, u32)], f: &PolyExpr) -> u32 {
    den.iter().find(|(g, _)| g == f).map(|(_, e)| *e).unwrap_or(0)
}

impl RatExpr {
    pub fn zero() -> Self {
        RatExpr::default()
    }

    pub fn one() -> Self {
        Self::from_poly(PolyExpr::one())
    }

    pub fn int(n: i64) -> Self {
        Self::from_poly(PolyExpr::int(n))
    }

    pub fn constant(c: KappaRational) -> Self {
        Self::from_poly(PolyExpr::constant(c))
    }

    pub fn kappa() -> Self {
        Self::constant(KappaRational::kappa())
    }

    pub fn var(v: JetVar) -> Self {
        Self::from_poly(PolyExpr::var(v))
    }

    pub fn var_pow(v: JetVar, e: Exponent) -> Self {
        Self::from_poly(PolyExpr::term(Monomial::power(v, e), KappaRational::one()))
    }

    pub fn from_poly(p: PolyExpr) -> Self {
        RatExpr { num: p, den: Vec::new() }
    }

    /// num / prod(factors^e), normalizing each factor.
    pub fn from_parts(num: PolyExpr, factors: &[(PolyExpr, u32)]) -> Result<Self> {
        let mut r = Self::from_poly(num);
        for (f, e) in factors {
            let inv = Self::from_poly(f.clone()).inv()?;
            r = r.mul(&inv.pow(*e as i64)?);
        }
        Ok(r)
    }

    pub fn num(&self) -> &PolyExpr {
        &self.num
    }

    pub fn den_factors(&self) -> &[(PolyExpr, u32)] {
        &self.den
    }

    /// Expanded denominator.
    pub fn den(&self) -> PolyExpr {
        self.den.iter().fold(PolyExpr::one(), |acc, (f, e)| acc.mul(&f.pow(*e)))
    }

    pub fn as_poly(&self) -> Option<&PolyExpr> {
        self.den.is_empty().then_some(&self.num)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn as_constant(&self) -> Option<KappaRational> {
        if self.den.is_empty() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn term_count(&self) -> usize {
        self.num.len()
    }

    pub fn vars(&self) -> alloc::collections::BTreeSet<JetVar> {
        let mut s = self.num.vars();
        for (f, _) in &self.den {
            s.extend(f.vars());
        }
        s
    }

    pub fn contains_var(&self, v: &JetVar) -> bool {
        self.num.contains_var(v) || self.den.iter().any(|(f, _)| f.contains_var(v))
    }

    fn widen(&self, target: &[(PolyExpr, u32)]) -> PolyExpr {
        let mut n = self.num.clone();
        for (f, e) in target {
            let have = exponent_of(&self.den, f);
            if *e > have {
                n = n.mul(&f.pow(e - have));
            }
        }
        n
    }

    fn normalized(num: PolyExpr, den: Vec<(PolyExpr, u32)>) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        RatExpr { num, den: den.into_iter().filter(|(_, e)| *e > 0).collect() }
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            return Self::normalized(self.num.add(&o.num), self.den.clone());
        }
        let l = merge_max(&self.den, &o.den);
        Self::normalized(self.widen(&l).add(&o.widen(&l)), l)
    }

    pub fn neg(&self) -> Self {
        RatExpr { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        Self::normalized(self.num.mul(&o.num), merge_sum(&self.den, &o.den))
    }

    pub fn scale(&self, k: &KappaRational) -> Self {
        Self::normalized(self.num.scale(k), self.den.clone())
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(KernelError::DivisionByZero);
        }
        let (c, m, p) = self.num.split_unit();
        let unit = PolyExpr::term(m.inv(), c.inv()?);
        let num = self.den.iter().fold(unit, |acc, (f, e)| acc.mul(&f.pow(*e)));
        if p.is_one() {
            Ok(Self::from_poly(num))
        } else {
            Ok(RatExpr { num, den: alloc::vec![(p, 1)] })
        }
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        if o.is_zero() {
            return Err(KernelError::DivisionByZero);
        }
        Ok(self.mul(&o.inv()?))
    }

    pub fn pow(&self, n: i64) -> Result<Self> {
        if n < 0 {
            return self.inv()?.pow(-n);
        }
        let n = n as u32;
        Ok(Self::normalized(
            self.num.pow(n),
            self.den.iter().map(|(f, e)| (f.clone(), e * n)).collect(),
        ))
    }

    /// Raise to a kappa-affine power; non-integer powers need a single-term base with unit coefficient.
    pub fn pow_exponent(&self, e: &Exponent) -> Result<Self> {
        if let Some(n) = e.as_int() {
            return self.pow(n);
        }
        match (self.den.is_empty(), self.num.single_term()) {
            (true, Some((m, c))) if c.is_one() => Ok(Self::from_poly(PolyExpr::term(m.pow(e)?, KappaRational::one()))),
            _ => Err(KernelError::NonAffineExponent(alloc::format!(
                "non-integer power {}+{}*kappa of a non-monomial",
                e.a,
                e.b
            ))),
        }
    }

    pub fn partial(&self, v: &JetVar) -> Self {
        let mut acc = Self::normalized(self.num.partial(v), self.den.clone());
        for (i, (f, e)) in self.den.iter().enumerate() {
            let df = f.partial(v);
            if df.is_zero() {
                continue;
            }
            let mut den = self.den.clone();
            den[i].1 += 1;
            let n = self.num.mul(&df).scale(&KappaRational::from_int(-(*e as i64)));
            acc = acc.add(&Self::normalized(n, den));
        }
        acc
    }

    /// Algebraic equality by cross-multiplication.
    pub fn equals(&self, o: &Self) -> bool {
        self.sub(o).is_zero()
    }

    /// Replace jet variables by expressions. Non-integer powers of a bound variable require
    /// the binding to be a single monomial.
    pub fn substitute(&self, bind: &dyn Fn(&JetVar) -> Option<RatExpr>) -> Result<Self> {
        let mut cache: BTreeMap<(JetVar, Exponent), RatExpr> = BTreeMap::new();
        let mut bound: BTreeMap<JetVar, Option<RatExpr>> = BTreeMap::new();
        let mut poly_sub = |p: &PolyExpr| -> Result<RatExpr> {
            let mut free_terms = Vec::new();
            let mut acc = RatExpr::zero();
            for (m, c) in p.terms() {
                let mut rest = Vec::new();
                let mut factor = RatExpr::one();
                let mut touched = false;
                for (v, e) in m.vars() {
                    let b = bound.entry(*v).or_insert_with(|| bind(v));
                    match b {
                        Some(b) => {
                            touched = true;
                            let pe = match cache.get(&(*v, *e)) {
                                Some(x) => x.clone(),
                                None => {
                                    let x = b.pow_exponent(e)?;
                                    cache.insert((*v, *e), x.clone());
                                    x
                                }
                            };
                            factor = factor.mul(&pe);
                        }
                        None => rest.push((*v, *e)),
                    }
                }
                let mono = Monomial::from_pairs(rest);
                if touched {
                    acc = acc.add(&factor.mul(&RatExpr::from_poly(PolyExpr::term(mono, c.clone()))));
                } else {
                    free_terms.push((mono, c.clone()));
                }
            }
            Ok(acc.add(&RatExpr::from_poly(PolyExpr::from_terms(free_terms))))
        };
        let mut out = poly_sub(&self.num)?;
        for (f, e) in &self.den {
            let s = poly_sub(f)?;
            out = out.div(&s.pow(*e as i64)?)?;
        }
        Ok(out)
    }

    pub fn substitute_map(&self, map: &BTreeMap<JetVar, RatExpr>) -> Result<Self> {
        self.substitute(&|v| map.get(v).cloned())
    }

    pub fn specialize_kappa(&self, k: &BigRational) -> Result<Self> {
        let factors: Result<Vec<_>> =
            self.den.iter().map(|(f, e)| Ok((f.specialize_kappa(k)?, *e))).collect();
        let factors = factors?;
        if factors.iter().any(|(f, _)| f.is_zero()) {
            return Err(KernelError::DivisionByZero);
        }
        Self::from_parts(self.num.specialize_kappa(k)?, &factors)
    }

    /// Try to cancel denominator factors against the numerator by exact division.
    pub fn cancel(&self) -> Self {
        let mut num = self.num.clone();
        let mut den = Vec::new();
        for (f, e) in &self.den {
            let mut left = *e;
            while left > 0 {
                match num.div_exact(f) {
                    Some(q) => {
                        num = q;
                        left -= 1;
                    }
                    None => break,
                }
            }
            if left > 0 {
                den.push((f.clone(), left));
            }
        }
        Self::normalized(num, den)
    }

    /// Exact quotient self / d, allowing the divisor to share factors with our denominator.
    /// Returns None when the numerator of `d` does not divide.
    pub fn div_exact(&self, d: &RatExpr) -> Option<RatExpr> {
        if d.is_zero() {
            return None;
        }
        let (c, m, p) = d.num.split_unit();
        let unit = PolyExpr::term(m.inv(), c.inv().ok()?);
        let mut acc = self.num.clone();
        for (f, e) in &d.den {
            acc = acc.mul(&f.pow(*e));
        }
        let finish = |q: PolyExpr, den: Vec<(PolyExpr, u32)>| {
            RatExpr::normalized(q.mul(&unit), den).cancel()
        };
        if p.is_one() {
            return Some(finish(acc, self.den.clone()));
        }
        if let Some(q) = acc.div_exact(&p) {
            return Some(finish(q, self.den.clone()));
        }
        let mut extra: Vec<(PolyExpr, u32)> = Vec::new();
        for (f, e) in &self.den {
            for _ in 0..*e {
                acc = acc.mul(f);
                extra = merge_sum(&extra, &[(f.clone(), 1)]);
                if let Some(q) = acc.div_exact(&p) {
                    return Some(finish(q, merge_sum(&self.den, &extra)));
                }
            }
        }
        None
    }
}

impl From<PolyExpr> for RatExpr {
    fn from(p: PolyExpr) -> Self {
        RatExpr::from_poly(p)
    }
}

impl From<JetVar> for RatExpr {
    fn from(v: JetVar) -> Self {
        RatExpr::var(v)
    }
}
