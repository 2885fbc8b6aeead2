use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Zero};

use crate::error::{KernelError, Result};
use crate::kappa::{KPoly, KappaRational};

/// Exponent a + b*kappa with rational a, b.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exponent {
    pub a: Rational64,
    pub b: Rational64,
}

impl Exponent {
    pub fn new(a: Rational64, b: Rational64) -> Self {
        Exponent { a, b }
    }

    pub fn int(n: i64) -> Self {
        Exponent { a: Rational64::from_integer(n), b: Rational64::zero() }
    }

    pub fn zero() -> Self {
        Self::int(0)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.a.is_one() && self.b.is_zero()
    }

    /// The integer value when free of kappa and integral.
    pub fn as_int(&self) -> Option<i64> {
        (self.b.is_zero() && self.a.is_integer()).then(|| self.a.to_integer())
    }

    pub fn add(&self, o: &Self) -> Self {
        Exponent { a: self.a + o.a, b: self.b + o.b }
    }

    pub fn neg(&self) -> Self {
        Exponent { a: -self.a, b: -self.b }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, k: Rational64) -> Self {
        Exponent { a: self.a * k, b: self.b * k }
    }

    /// Product of two exponents; fails when the result would be quadratic in kappa.
    pub fn mul(&self, o: &Self) -> Result<Self> {
        if self.b.is_zero() {
            Ok(o.scale(self.a))
        } else if o.b.is_zero() {
            Ok(self.scale(o.a))
        } else {
            Err(KernelError::NonAffineExponent(alloc::format!(
                "({}+{}*kappa)*({}+{}*kappa)",
                self.a,
                self.b,
                o.a,
                o.b
            )))
        }
    }

    pub fn to_kappa_rational(&self) -> KappaRational {
        let l = self.a.denom() * self.b.denom() / num_integer::gcd(*self.a.denom(), *self.b.denom());
        let a = self.a * Rational64::from_integer(l);
        let b = self.b * Rational64::from_integer(l);
        KappaRational::new(
            KPoly::from_coeffs(alloc::vec![BigInt::from(a.to_integer()), BigInt::from(b.to_integer())]),
            KPoly::constant(BigInt::from(l)),
        )
        .expect("nonzero denominator")
    }

    /// Reads back an exponent from a kappa-rational of degree at most one with constant denominator.
    pub fn from_kappa_rational(k: &KappaRational) -> Result<Self> {
        let bad = || KernelError::NonAffineExponent(alloc::format!("{:?}", k));
        let d = k.den().as_constant().ok_or_else(bad)?;
        let c = k.num().coeffs();
        if c.len() > 2 {
            return Err(bad());
        }
        let to = |n: Option<&BigInt>| -> Result<Rational64> {
            let n = n.cloned().unwrap_or_default();
            let r = BigRational::new(n, d.clone());
            let num: i64 = r.numer().try_into().map_err(|_| bad())?;
            let den: i64 = r.denom().try_into().map_err(|_| bad())?;
            Ok(Rational64::new(num, den))
        };
        Ok(Exponent { a: to(c.first())?, b: to(c.get(1))? })
    }

    pub fn eval(&self, kappa: &BigRational) -> BigRational {
        let conv = |r: Rational64| BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()));
        conv(self.a) + conv(self.b) * kappa
    }

    pub fn eval_f64(&self, kappa: f64) -> f64 {
        let f = |r: Rational64| *r.numer() as f64 / *r.denom() as f64;
        f(self.a) + f(self.b) * kappa
    }

    /// Whether the exponent may take non-integer values.
    pub fn is_fractional(&self) -> bool {
        !(self.a.is_integer() && self.b.is_zero())
    }
}
