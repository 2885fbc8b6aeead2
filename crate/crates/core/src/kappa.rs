//! Univariate polynomials over Z in the parameter kappa, and their quotients.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{KernelError, Result};

/// Integer polynomial in kappa, coefficients stored from degree 0 upward.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct KPoly(Vec<BigInt>);

impl KPoly {
    pub fn zero() -> Self {
        KPoly(Vec::new())
    }

    pub fn one() -> Self {
        KPoly(vec![BigInt::one()])
    }

    pub fn kappa() -> Self {
        KPoly(vec![BigInt::zero(), BigInt::one()])
    }

    pub fn constant(c: BigInt) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn from_coeffs(c: Vec<BigInt>) -> Self {
        let mut p = KPoly(c);
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.0.len() == 1 && self.0[0].is_one()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn lc(&self) -> Option<&BigInt> {
        self.0.last()
    }

    pub fn as_constant(&self) -> Option<BigInt> {
        match self.0.len() {
            0 => Some(BigInt::zero()),
            1 => Some(self.0[0].clone()),
            _ => None,
        }
    }

    pub fn add(&self, o: &KPoly) -> KPoly {
        let n = self.0.len().max(o.0.len());
        let mut c = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.0.get(i);
            let b = o.0.get(i);
            c.push(match (a, b) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            });
        }
        Self::from_coeffs(c)
    }

    pub fn neg(&self) -> KPoly {
        KPoly(self.0.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, o: &KPoly) -> KPoly {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &KPoly) -> KPoly {
        if self.is_zero() || o.is_zero() {
            return KPoly::zero();
        }
        let mut c = vec![BigInt::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Self::from_coeffs(c)
    }

    pub fn scale(&self, k: &BigInt) -> KPoly {
        Self::from_coeffs(self.0.iter().map(|c| c * k).collect())
    }

    fn div_scalar(&self, k: &BigInt) -> KPoly {
        KPoly(self.0.iter().map(|c| c / k).collect())
    }

    fn shift(&self, n: usize) -> KPoly {
        if self.is_zero() {
            return KPoly::zero();
        }
        let mut c = vec![BigInt::zero(); n];
        c.extend(self.0.iter().cloned());
        KPoly(c)
    }

    /// Non-negative gcd of the coefficients; zero for the zero polynomial.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.0 {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Primitive part with positive leading coefficient.
    pub fn primitive(&self) -> KPoly {
        if self.is_zero() {
            return KPoly::zero();
        }
        let mut g = self.content();
        if self.lc().is_some_and(|c| c.is_negative()) {
            g = -g;
        }
        self.div_scalar(&g)
    }

    /// Exact quotient over Z, or None when `d` does not divide `self`.
    pub fn div_exact(&self, d: &KPoly) -> Option<KPoly> {
        let dd = d.degree()?;
        if self.is_zero() {
            return Some(KPoly::zero());
        }
        let mut r = self.0.clone();
        let sd = self.degree().unwrap();
        if sd < dd {
            return None;
        }
        let mut q = vec![BigInt::zero(); sd - dd + 1];
        let dl = d.lc().unwrap();
        for k in (0..=sd - dd).rev() {
            let top = &r[k + dd];
            if top.is_zero() {
                continue;
            }
            let (qq, rem) = top.div_rem(dl);
            if !rem.is_zero() {
                return None;
            }
            for (j, dc) in d.0.iter().enumerate() {
                r[k + j] -= &qq * dc;
            }
            q[k] = qq;
        }
        if r.iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(Self::from_coeffs(q))
    }

    fn prem(a: &KPoly, b: &KPoly) -> KPoly {
        let db = b.degree().unwrap();
        let lb = b.lc().unwrap().clone();
        let mut r = a.clone();
        while let Some(dr) = r.degree() {
            if dr < db {
                break;
            }
            let lr = r.lc().unwrap().clone();
            r = r.scale(&lb).sub(&b.shift(dr - db).scale(&lr));
        }
        r
    }

    /// Greatest common divisor including the integer content, positive leading coefficient.
    pub fn gcd(&self, o: &KPoly) -> KPoly {
        if self.is_zero() {
            return o.normalized_sign();
        }
        if o.is_zero() {
            return self.normalized_sign();
        }
        let c = self.content().gcd(&o.content());
        let (mut a, mut b) = (self.primitive(), o.primitive());
        if a.degree() < b.degree() {
            core::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            if b.degree() == Some(0) {
                a = KPoly::one();
                break;
            }
            let r = Self::prem(&a, &b).primitive();
            a = b;
            b = r;
        }
        a.scale(&c)
    }

    fn normalized_sign(&self) -> KPoly {
        if self.lc().is_some_and(|c| c.is_negative()) {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn eval(&self, k: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.0.iter().rev() {
            acc = acc * k + BigRational::from_integer(c.clone());
        }
        acc
    }

    pub fn eval_f64(&self, k: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.0.iter().rev() {
            acc = acc * k + c.to_f64().unwrap_or(f64::NAN);
        }
        acc
    }

    /// Rational roots, found by the rational root test on the integer coefficients.
    pub fn rational_roots(&self) -> Vec<BigRational> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let mut p = self.clone();
        if p.0[0].is_zero() {
            out.push(BigRational::zero());
            while !p.is_zero() && p.0[0].is_zero() {
                p.0.remove(0);
            }
        }
        if p.degree().unwrap_or(0) == 0 {
            return out;
        }
        let lead = divisors(p.lc().unwrap());
        let tail = divisors(&p.0[0]);
        for q in &lead {
            for n in &tail {
                for s in [n.clone(), -n.clone()] {
                    let r = BigRational::new(s, q.clone());
                    if p.eval(&r).is_zero() && !out.contains(&r) {
                        out.push(r);
                    }
                }
            }
        }
        out.sort();
        out
    }
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut out = Vec::new();
    let Some(m) = n.to_u64() else {
        return out;
    };
    if m > 1 << 40 {
        return out;
    }
    let mut i = 1u64;
    while i * i <= m {
        if m % i == 0 {
            out.push(BigInt::from(i));
            if i * i != m {
                out.push(BigInt::from(m / i));
            }
        }
        i += 1;
    }
    out
}

/// Element of Q(kappa) kept as num/den over Z[kappa]: coprime, jointly primitive,
/// positive leading coefficient in the denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KappaRational {
    num: KPoly,
    den: KPoly,
}

impl PartialOrd for KappaRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for KappaRational {
    fn cmp(&self, other: &Self) -> Ordering {
        self.num.cmp(&other.num).then_with(|| self.den.cmp(&other.den))
    }
}

impl KappaRational {
    pub fn zero() -> Self {
        KappaRational { num: KPoly::zero(), den: KPoly::one() }
    }

    pub fn one() -> Self {
        KappaRational { num: KPoly::one(), den: KPoly::one() }
    }

    pub fn kappa() -> Self {
        KappaRational { num: KPoly::kappa(), den: KPoly::one() }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_poly(KPoly::constant(BigInt::from(n)))
    }

    pub fn from_poly(p: KPoly) -> Self {
        KappaRational { num: p, den: KPoly::one() }
    }

    pub fn from_rational(r: &BigRational) -> Self {
        Self::new(KPoly::constant(r.numer().clone()), KPoly::constant(r.denom().clone()))
            .expect("rational denominators are nonzero")
    }

    pub fn new(num: KPoly, den: KPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(KernelError::DivisionByZero);
        }
        Ok(Self::normalize(num, den))
    }

    fn normalize(mut num: KPoly, mut den: KPoly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        if den.degree() != Some(0) && num.degree() != Some(0) {
            let g = num.primitive().gcd(&den.primitive());
            if g.degree().unwrap_or(0) > 0 {
                num = num.div_exact(&g).expect("gcd divides numerator");
                den = den.div_exact(&g).expect("gcd divides denominator");
            }
        }
        let mut c = num.content().gcd(&den.content());
        if den.lc().unwrap().is_negative() {
            c = -c;
        }
        if !c.is_one() {
            num = num.div_scalar(&c);
            den = den.div_scalar(&c);
        }
        KappaRational { num, den }
    }

    pub fn num(&self) -> &KPoly {
        &self.num
    }

    pub fn den(&self) -> &KPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_integer_poly(&self) -> bool {
        self.den.is_one()
    }

    /// The value when free of kappa.
    pub fn as_rational(&self) -> Option<BigRational> {
        let n = self.num.as_constant()?;
        let d = self.den.as_constant()?;
        Some(BigRational::new(n, d))
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den.is_one() && o.den.is_one() {
            return KappaRational { num: self.num.add(&o.num), den: KPoly::one() };
        }
        if self.den == o.den {
            return Self::normalize(self.num.add(&o.num), self.den.clone());
        }
        Self::normalize(
            self.num.mul(&o.den).add(&o.num.mul(&self.den)),
            self.den.mul(&o.den),
        )
    }

    pub fn neg(&self) -> Self {
        KappaRational { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        if self.den.is_one() && o.den.is_one() {
            return KappaRational { num: self.num.mul(&o.num), den: KPoly::one() };
        }
        Self::normalize(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    pub fn inv(&self) -> Result<Self> {
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn pow(&self, n: i64) -> Result<Self> {
        let base = if n < 0 { self.inv()? } else { self.clone() };
        let mut acc = Self::one();
        for _ in 0..n.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    /// Sign of the numerator's leading coefficient; used for printing.
    pub fn leading_negative(&self) -> bool {
        self.num.lc().is_some_and(|c| c.is_negative())
    }

    pub fn eval(&self, k: &BigRational) -> Option<BigRational> {
        let d = self.den.eval(k);
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval(k) / d)
    }

    pub fn eval_f64(&self, k: f64) -> f64 {
        self.num.eval_f64(k) / self.den.eval_f64(k)
    }

    /// gcd of the numerators over the lcm of the denominators, so that every
    /// element divided by it lies in Z[kappa] and the quotients are jointly primitive.
    pub fn content_of<'a>(items: impl IntoIterator<Item = &'a KappaRational>) -> KappaRational {
        let mut g = KPoly::zero();
        let mut l = KPoly::one();
        for c in items {
            g = g.gcd(&c.num);
            let h = l.gcd(&c.den);
            l = l.mul(&c.den).div_exact(&h).expect("gcd divides");
        }
        if g.is_zero() {
            return Self::one();
        }
        Self::normalize(g, l)
    }
}
