use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::Result;
use crate::exponent::Exponent;
use crate::symbol::JetVar;

/// Product of jet variables raised to kappa-affine exponents, sorted by variable.
/// Ordered graded-lexicographically: total degree first, then exponents in variable order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Monomial {
    vars: Vec<(JetVar, Exponent)>,
    deg: Exponent,
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.deg.cmp(&other.deg).then_with(|| lex(&self.vars, &other.vars))
    }
}

fn lex(a: &[(JetVar, Exponent)], b: &[(JetVar, Exponent)]) -> Ordering {
    let zero = Exponent::zero();
    let (mut i, mut j) = (0, 0);
    loop {
        match (a.get(i), b.get(j)) {
            (None, None) => return Ordering::Equal,
            (Some((_, ea)), None) => return ea.cmp(&zero),
            (None, Some((_, eb))) => return zero.cmp(eb),
            (Some((va, ea)), Some((vb, eb))) => match va.cmp(vb) {
                Ordering::Equal => {
                    if ea != eb {
                        return ea.cmp(eb);
                    }
                    i += 1;
                    j += 1;
                }
                Ordering::Less => return ea.cmp(&zero),
                Ordering::Greater => return zero.cmp(eb),
            },
        }
    }
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn var(v: JetVar) -> Self {
        Self::power(v, Exponent::int(1))
    }

    pub fn power(v: JetVar, e: Exponent) -> Self {
        if e.is_zero() {
            return Self::one();
        }
        Monomial { vars: alloc::vec![(v, e)], deg: e }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (JetVar, Exponent)>) -> Self {
        let mut m = Self::one();
        for (v, e) in pairs {
            m = m.mul(&Self::power(v, e));
        }
        m
    }

    pub fn is_one(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn vars(&self) -> &[(JetVar, Exponent)] {
        &self.vars
    }

    pub fn degree(&self) -> Exponent {
        self.deg
    }

    pub fn exponent_of(&self, v: &JetVar) -> Exponent {
        match self.vars.binary_search_by(|(w, _)| w.cmp(v)) {
            Ok(i) => self.vars[i].1,
            Err(_) => Exponent::zero(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        if o.is_one() {
            return self.clone();
        }
        if self.is_one() {
            return o.clone();
        }
        let mut vars = Vec::with_capacity(self.vars.len() + o.vars.len());
        let (mut i, mut j) = (0, 0);
        while i < self.vars.len() || j < o.vars.len() {
            match (self.vars.get(i), o.vars.get(j)) {
                (Some(a), Some(b)) if a.0 == b.0 => {
                    let e = a.1.add(&b.1);
                    if !e.is_zero() {
                        vars.push((a.0, e));
                    }
                    i += 1;
                    j += 1;
                }
                (Some(a), Some(b)) if a.0 < b.0 => {
                    vars.push(*a);
                    i += 1;
                }
                (Some(_), Some(b)) => {
                    vars.push(*b);
                    j += 1;
                }
                (Some(a), None) => {
                    vars.push(*a);
                    i += 1;
                }
                (None, Some(b)) => {
                    vars.push(*b);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        Monomial { vars, deg: self.deg.add(&o.deg) }
    }

    pub fn inv(&self) -> Self {
        Monomial { vars: self.vars.iter().map(|(v, e)| (*v, e.neg())).collect(), deg: self.deg.neg() }
    }

    /// Raise to a power; every exponent is multiplied by `k`.
    pub fn pow(&self, k: &Exponent) -> Result<Self> {
        let mut vars = Vec::with_capacity(self.vars.len());
        let mut deg = Exponent::zero();
        for (v, e) in &self.vars {
            let ne = e.mul(k)?;
            if !ne.is_zero() {
                deg = deg.add(&ne);
                vars.push((*v, ne));
            }
        }
        Ok(Monomial { vars, deg })
    }

    /// The monomial with `v` removed, and the exponent it had.
    pub fn split(&self, v: &JetVar) -> (Self, Exponent) {
        match self.vars.binary_search_by(|(w, _)| w.cmp(v)) {
            Ok(i) => {
                let mut vars = self.vars.clone();
                let (_, e) = vars.remove(i);
                (Monomial { vars, deg: self.deg.sub(&e) }, e)
            }
            Err(_) => (self.clone(), Exponent::zero()),
        }
    }

    /// Per-variable minimum of the exponents in both monomials (absent counts as zero).
    pub fn meet(&self, o: &Self) -> Self {
        let zero = Exponent::zero();
        let mut pairs = Vec::new();
        for (v, e) in &self.vars {
            let f = o.exponent_of(v);
            let m = if *e < f { *e } else { f };
            pairs.push((*v, m));
        }
        for (v, f) in &o.vars {
            if self.exponent_of(v).is_zero() && *f < zero {
                pairs.push((*v, *f));
            }
        }
        Self::from_pairs(pairs)
    }
}
