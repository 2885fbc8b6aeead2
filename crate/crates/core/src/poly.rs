use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_rational::{BigRational, Rational64};
use num_traits::Zero;

use crate::error::{KernelError, Result};
use crate::exponent::Exponent;
use crate::kappa::KappaRational;
use crate::monomial::Monomial;
use crate::symbol::JetVar;

/// Sum of kappa-rational multiples of monomials, sorted ascending by monomial order.
/// No zero coefficients, no repeated monomials.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct PolyExpr {
    terms: Vec<(Monomial, KappaRational)>,
}

impl PartialOrd for PolyExpr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PolyExpr {
    fn cmp(&self, other: &Self) -> Ordering {
        self.terms.len().cmp(&other.terms.len()).then_with(|| self.terms.cmp(&other.terms))
    }
}

impl PolyExpr {
    pub fn zero() -> Self {
        PolyExpr::default()
    }

    pub fn one() -> Self {
        Self::constant(KappaRational::one())
    }

    pub fn constant(c: KappaRational) -> Self {
        Self::term(Monomial::one(), c)
    }

    pub fn int(n: i64) -> Self {
        Self::constant(KappaRational::from_int(n))
    }

    pub fn term(m: Monomial, c: KappaRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        PolyExpr { terms: alloc::vec![(m, c)] }
    }

    pub fn var(v: JetVar) -> Self {
        Self::term(Monomial::var(v), KappaRational::one())
    }

    /// Builds from arbitrary terms, merging duplicates and dropping zeros.
    pub fn from_terms(mut t: Vec<(Monomial, KappaRational)>) -> Self {
        t.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: Vec<(Monomial, KappaRational)> = Vec::with_capacity(t.len());
        for (m, c) in t {
            match out.last_mut() {
                Some(last) if last.0 == m => last.1 = last.1.add(&c),
                _ => {
                    if let Some(last) = out.last() {
                        if last.1.is_zero() {
                            out.pop();
                        }
                    }
                    out.push((m, c));
                }
            }
        }
        if out.last().is_some_and(|l| l.1.is_zero()) {
            out.pop();
        }
        PolyExpr { terms: out }
    }

    pub fn terms(&self) -> &[(Monomial, KappaRational)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    pub fn as_constant(&self) -> Option<KappaRational> {
        match self.terms.as_slice() {
            [] => Some(KappaRational::zero()),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn single_term(&self) -> Option<(&Monomial, &KappaRational)> {
        match self.terms.as_slice() {
            [(m, c)] => Some((m, c)),
            _ => None,
        }
    }

    /// The term with the greatest monomial.
    pub fn leading(&self) -> Option<(&Monomial, &KappaRational)> {
        self.terms.last().map(|(m, c)| (m, c))
    }

    pub fn vars(&self) -> BTreeSet<JetVar> {
        let mut s = BTreeSet::new();
        for (m, _) in &self.terms {
            for (v, _) in m.vars() {
                s.insert(*v);
            }
        }
        s
    }

    pub fn contains_var(&self, v: &JetVar) -> bool {
        self.terms.iter().any(|(m, _)| !m.exponent_of(v).is_zero())
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.terms.len() + o.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < o.terms.len() {
            let (a, b) = (&self.terms[i], &o.terms[j]);
            match a.0.cmp(&b.0) {
                Ordering::Less => {
                    out.push(a.clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b.clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let c = a.1.add(&b.1);
                    if !c.is_zero() {
                        out.push((a.0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        out.extend_from_slice(&o.terms[j..]);
        PolyExpr { terms: out }
    }

    pub fn neg(&self) -> Self {
        PolyExpr { terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, k: &KappaRational) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        if k.is_one() {
            return self.clone();
        }
        PolyExpr { terms: self.terms.iter().map(|(m, c)| (m.clone(), c.mul(k))).collect() }
    }

    pub fn mul_term(&self, m: &Monomial, k: &KappaRational) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        Self::from_terms(self.terms.iter().map(|(n, c)| (n.mul(m), c.mul(k))).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        if let Some((m, c)) = o.single_term() {
            return self.mul_term(m, c);
        }
        if let Some((m, c)) = self.single_term() {
            return o.mul_term(m, c);
        }
        let mut acc: BTreeMap<Monomial, KappaRational> = BTreeMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                let m = m1.mul(m2);
                let c = c1.mul(c2);
                match acc.get_mut(&m) {
                    Some(e) => *e = e.add(&c),
                    None => {
                        acc.insert(m, c);
                    }
                }
            }
        }
        PolyExpr { terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect() }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn sum(items: impl IntoIterator<Item = PolyExpr>) -> Self {
        let mut all = Vec::new();
        for p in items {
            all.extend(p.terms);
        }
        Self::from_terms(all)
    }

    /// Partial derivative with respect to `v`, treating every other jet variable as independent.
    pub fn partial(&self, v: &JetVar) -> Self {
        let mut out = Vec::new();
        for (m, c) in &self.terms {
            let e = m.exponent_of(v);
            if e.is_zero() {
                continue;
            }
            let m2 = m.mul(&Monomial::power(*v, Exponent::int(-1)));
            out.push((m2, c.mul(&e.to_kappa_rational())));
        }
        Self::from_terms(out)
    }

    pub fn map_coeffs(&self, mut f: impl FnMut(&KappaRational) -> Result<KappaRational>) -> Result<Self> {
        let mut out = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            out.push((m.clone(), f(c)?));
        }
        Ok(Self::from_terms(out))
    }

    /// Every monomial raised with all exponents evaluated at kappa = `k`, and every
    /// coefficient evaluated there as well.
    pub fn specialize_kappa(&self, k: &BigRational) -> Result<Self> {
        let small = to_small(k)?;
        let mut out = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let v = c.eval(k).ok_or(KernelError::DivisionByZero)?;
            let pairs = m.vars().iter().map(|(w, e)| {
                (*w, Exponent::new(e.a + e.b * small, Rational64::zero()))
            });
            out.push((Monomial::from_pairs(pairs), KappaRational::from_rational(&v)));
        }
        Ok(Self::from_terms(out))
    }

    /// Integer exponents of `v` appearing in this polynomial, or None if some exponent is not an integer.
    pub fn int_exponents(&self, v: &JetVar) -> Option<BTreeSet<i64>> {
        let mut s = BTreeSet::new();
        for (m, _) in &self.terms {
            s.insert(m.exponent_of(v).as_int()?);
        }
        Some(s)
    }

    /// Coefficients of the powers of `v`; requires integer exponents.
    pub fn coefficients_in(&self, v: &JetVar) -> Option<BTreeMap<i64, PolyExpr>> {
        let mut groups: BTreeMap<i64, Vec<(Monomial, KappaRational)>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (rest, e) = m.split(v);
            groups.entry(e.as_int()?).or_default().push((rest, c.clone()));
        }
        Some(groups.into_iter().map(|(k, t)| (k, PolyExpr::from_terms(t))).collect())
    }

    fn mul_var_power(&self, v: &JetVar, k: i64) -> Self {
        if k == 0 {
            return self.clone();
        }
        self.mul_term(&Monomial::power(*v, Exponent::int(k)), &KappaRational::one())
    }

    /// Splits off the unit part: `self = c * m * p` where `p` has jointly primitive integer-polynomial
    /// coefficients, no common monomial factor, and a leading coefficient with positive leading term.
    pub fn split_unit(&self) -> (KappaRational, Monomial, PolyExpr) {
        if self.is_zero() {
            return (KappaRational::zero(), Monomial::one(), Self::zero());
        }
        let mut m = self.terms[0].0.clone();
        for (n, _) in &self.terms[1..] {
            m = m.meet(n);
        }
        let mut c = KappaRational::content_of(self.terms.iter().map(|(_, c)| c));
        let ci = c.inv().expect("nonzero content");
        let mi = m.inv();
        let mut p = Self::from_terms(self.terms.iter().map(|(n, k)| (n.mul(&mi), k.mul(&ci))).collect());
        if p.leading().is_some_and(|(_, k)| k.leading_negative()) {
            p = p.neg();
            c = c.neg();
        }
        (c, m, p)
    }

    /// Exact quotient in the ring of generalized Laurent polynomials, or None.
    pub fn div_exact(&self, d: &PolyExpr) -> Option<PolyExpr> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        if let Some((m, c)) = d.single_term() {
            return Some(self.mul_term(&m.inv(), &c.inv().ok()?));
        }
        let pivot = d.vars().into_iter().rev().find(|v| {
            d.int_exponents(v).is_some_and(|s| s.len() > 1) && self.int_exponents(v).is_some()
        })?;
        self.div_exact_in(d, &pivot)
    }

    /// Laurent long division treating both sides as polynomials in `v`.
    pub fn div_exact_in(&self, d: &PolyExpr, v: &JetVar) -> Option<PolyExpr> {
        let dc = d.coefficients_in(v)?;
        let (dm, dmax) = (*dc.keys().next()?, *dc.keys().next_back()?);
        let span = dmax - dm;
        let dlead = dc.get(&dmax)?.clone();
        let dn = d.mul_var_power(v, -dm);
        let mut r = self.clone();
        let mut q = Self::zero();
        while !r.is_zero() {
            let rc = r.coefficients_in(v)?;
            let (rm, rmax) = (*rc.keys().next()?, *rc.keys().next_back()?);
            if rmax - rm < span {
                return None;
            }
            let t = rc.get(&rmax)?.div_exact(&dlead)?;
            let shift = rmax - span;
            let tq = t.mul_var_power(v, shift);
            r = r.sub(&tq.mul(&dn));
            q = q.add(&tq);
            if r.coefficients_in(v)?.keys().next_back().is_some_and(|&top| top >= rmax) {
                return None;
            }
        }
        Some(q.mul_var_power(v, -dm))
    }
}

fn to_small(k: &BigRational) -> Result<Rational64> {
    let n: i64 = k.numer().try_into().map_err(|_| KernelError::Evaluation(alloc::format!("{}", k)))?;
    let d: i64 = k.denom().try_into().map_err(|_| KernelError::Evaluation(alloc::format!("{}", k)))?;
    Ok(Rational64::new(n, d))
}

impl From<JetVar> for PolyExpr {
    fn from(v: JetVar) -> Self {
        PolyExpr::var(v)
    }
}

impl From<KappaRational> for PolyExpr {
    fn from(c: KappaRational) -> Self {
        PolyExpr::constant(c)
    }
}
