//! Deterministic rendering that parses back to the same normalized value.

use jetforge_core::forms::Form;
use jetforge_core::{Covering, Equation, Exponent, KPoly, KappaRational, Monomial, PolyExpr, RatExpr};
use num_bigint::BigInt;
use num_rational::Rational64;
use num_traits::{One, Signed, Zero};

fn int_times(c: &BigInt, what: &str) -> String {
    if what.is_empty() {
        return c.to_string();
    }
    if c.is_one() {
        what.to_string()
    } else if *c == -BigInt::one() {
        format!("-{what}")
    } else {
        format!("{c}*{what}")
    }
}

/// `2*kappa^2+3*kappa-1`, highest power first.
pub fn kpoly(p: &KPoly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, c) in p.coeffs().iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let var = match i {
            0 => String::new(),
            1 => "kappa".to_string(),
            _ => format!("kappa^{i}"),
        };
        let t = int_times(c, &var);
        if !out.is_empty() && !t.starts_with('-') {
            out.push('+');
        }
        out.push_str(&t);
    }
    out
}

fn is_atom_poly(p: &KPoly) -> bool {
    p.coeffs().iter().filter(|c| !c.is_zero()).count() == 1 && !p.lc().is_some_and(|c| c.is_negative())
}

/// `num/den` with parentheses where a factor is not a bare constant.
pub fn kappa_rational(c: &KappaRational) -> String {
    let num = kpoly(c.num());
    if c.den().is_one() {
        return num;
    }
    let wrap = |p: &KPoly, s: String| if p.as_constant().is_some() && !s.starts_with('-') { s } else { format!("({s})") };
    format!("{}/{}", wrap(c.num(), num), wrap(c.den(), kpoly(c.den())))
}

fn rational(r: &Rational64) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn exponent(e: &Exponent) -> String {
    let mut parts = Vec::new();
    if !e.b.is_zero() {
        let t = if e.b.is_one() {
            "kappa".to_string()
        } else if e.b == -Rational64::one() {
            "-kappa".to_string()
        } else {
            format!("{}*kappa", rational(&e.b))
        };
        parts.push(t);
    }
    if !e.a.is_zero() || parts.is_empty() {
        let t = rational(&e.a);
        if !parts.is_empty() && !t.starts_with('-') {
            parts.push(format!("+{t}"));
        } else {
            parts.push(t);
        }
    }
    parts.concat()
}

pub fn monomial(m: &Monomial) -> String {
    let mut out = Vec::new();
    for (v, e) in m.vars() {
        let base = v.render();
        if e.is_one() {
            out.push(base);
        } else if let Some(n) = e.as_int().filter(|n| *n > 0) {
            out.push(format!("{base}^{n}"));
        } else {
            out.push(format!("{base}^({})", exponent(e)));
        }
    }
    out.join("*")
}

fn term(m: &Monomial, c: &KappaRational) -> String {
    if c.as_rational().is_none() && c.leading_negative() {
        return format!("-{}", term(m, &c.neg()));
    }
    let mono = monomial(m);
    if let Some(r) = c.as_rational() {
        if r.is_integer() {
            return int_times(r.numer(), &mono);
        }
        if mono.is_empty() {
            return format!("{}/{}", r.numer(), r.denom());
        }
        return format!("{}/{}*{mono}", r.numer(), r.denom());
    }
    let coeff = if c.den().is_one() && is_atom_poly(c.num()) {
        kpoly(c.num())
    } else if c.den().is_one() {
        format!("({})", kpoly(c.num()))
    } else {
        kappa_rational(c)
    };
    if mono.is_empty() {
        coeff
    } else {
        format!("{coeff}*{mono}")
    }
}

/// Terms from the largest monomial down.
pub fn poly(p: &PolyExpr) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (m, c) in p.terms().iter().rev() {
        let t = term(m, c);
        if !out.is_empty() {
            if let Some(rest) = t.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(rest);
                continue;
            }
            out.push_str(" + ");
        }
        out.push_str(&t);
    }
    out
}

fn needs_parens(p: &PolyExpr) -> bool {
    p.len() > 1 || poly(p).contains(['+', '/', '*', '-', '^'])
}

pub fn ratexpr(r: &RatExpr) -> String {
    let num = poly(r.num());
    if r.den_factors().is_empty() {
        return num;
    }
    let num = if needs_parens(r.num()) { format!("({num})") } else { num };
    let den: Vec<String> = r
        .den_factors()
        .iter()
        .map(|(f, k)| if *k == 1 { format!("({})", poly(f)) } else { format!("({})^{k}", poly(f)) })
        .collect();
    if den.len() == 1 {
        format!("{num}/{}", den[0])
    } else {
        format!("{num}/({})", den.join("*"))
    }
}

pub fn equation(e: &Equation) -> String {
    format!("{} = {}", e.principal.render(), ratexpr(&e.rhs))
}

pub fn covering(c: &Covering) -> String {
    let p = jetforge_core::JetVar::base(c.pseudo);
    format!(
        "{} = {}, {} = {}",
        p.shifted(jetforge_core::Direction::T).render(),
        ratexpr(&c.f_t),
        p.shifted(jetforge_core::Direction::Y).render(),
        ratexpr(&c.f_y)
    )
}

pub fn form(f: &Form) -> String {
    if f.is_zero() {
        return "0".into();
    }
    let mut out = Vec::new();
    for (key, c) in f.terms() {
        let basis: Vec<String> = key.iter().map(|d| d.render()).collect();
        let basis = basis.join("/\\");
        let coeff = ratexpr(c);
        if basis.is_empty() {
            out.push(format!("({coeff})"));
        } else if coeff == "1" {
            out.push(basis);
        } else {
            out.push(format!("({coeff})*{basis}"));
        }
    }
    out.join(" + ")
}
