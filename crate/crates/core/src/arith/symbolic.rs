//! Multivariate Laurent-polynomial fractions for symbolic edge weights.
//!
//! Values are kept as unreduced `num/den` pairs; equality is decided by
//! cross-multiplication, which is exact without multivariate gcds.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use super::field::{fmt_scalar, Field, Scalar};

/// Exponent vector with trailing zeros trimmed; exponents may be negative.
pub type Monomial = Vec<i32>;

fn trim(mut m: Monomial) -> Monomial {
    while m.last() == Some(&0) {
        m.pop();
    }
    m
}

fn mono_mul(a: &[i32], b: &[i32]) -> Monomial {
    let n = a.len().max(b.len());
    trim((0..n).map(|i| a.get(i).unwrap_or(&0) + b.get(i).unwrap_or(&0)).collect())
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct MPoly {
    terms: BTreeMap<Monomial, Scalar>,
}

impl MPoly {
    pub fn zero() -> Self {
        MPoly::default()
    }

    pub fn constant(c: Scalar) -> Self {
        let mut p = MPoly::zero();
        if !Field::is_zero(&c) {
            p.terms.insert(Vec::new(), c);
        }
        p
    }

    pub fn var(i: usize, exp: i32) -> Self {
        let mut m = vec![0; i + 1];
        m[i] = exp;
        let mut p = MPoly::zero();
        p.terms.insert(trim(m), Field::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    fn add_term(&mut self, m: Monomial, c: Scalar) {
        let e = self.terms.entry(m).or_insert_with(<Scalar as Field>::zero);
        *e = e.clone() + c;
        if Field::is_zero(e) {
            self.terms.retain(|_, v| !Field::is_zero(v));
        }
    }

    fn single_term(&self) -> Option<(&Monomial, &Scalar)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    pub fn eval(&self, point: &[Scalar]) -> Option<Scalar> {
        let mut acc = <Scalar as Field>::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.iter().enumerate() {
                t *= point.get(i)?.powi(e as i64)?;
            }
            acc += t;
        }
        Some(acc)
    }

    pub fn format(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out: Vec<String> = Vec::new();
        for (m, c) in self.terms.iter().rev() {
            let mut factors = Vec::new();
            for (i, &e) in m.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let name = names.get(i).cloned().unwrap_or_else(|| format!("x{i}"));
                factors.push(if e == 1 { name } else { format!("{name}^{e}") });
            }
            let cs = fmt_scalar(c);
            let body = factors.join("·");
            out.push(match (cs.as_str(), body.is_empty()) {
                (_, true) => cs,
                ("1", false) => body,
                ("-1", false) => format!("-{body}"),
                _ => format!("{cs}·{body}"),
            });
        }
        out.join(" + ").replace("+ -", "- ")
    }
}

impl Add for MPoly {
    type Output = Self;
    fn add(mut self, o: Self) -> Self {
        for (m, c) in o.terms {
            self.add_term(m, c);
        }
        self
    }
}

impl Neg for MPoly {
    type Output = Self;
    fn neg(self) -> Self {
        MPoly { terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect() }
    }
}

impl Sub for MPoly {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Mul for MPoly {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut out = MPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                out.add_term(mono_mul(ma, mb), ca.clone() * cb.clone());
            }
        }
        out
    }
}

/// Fraction of multivariate Laurent polynomials.
#[derive(Clone, Debug)]
pub struct SymFrac {
    num: MPoly,
    den: MPoly,
}

impl SymFrac {
    pub fn from_poly(p: MPoly) -> Self {
        SymFrac { num: p, den: MPoly::constant(Field::one()) }
    }

    pub fn var(i: usize) -> Self {
        Self::from_poly(MPoly::var(i, 1))
    }

    /// Builds `num/den`; `den` must be nonzero.
    pub fn ratio(num: MPoly, den: MPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        SymFrac { num, den }.absorb()
    }

    pub fn num(&self) -> &MPoly {
        &self.num
    }

    pub fn den(&self) -> &MPoly {
        &self.den
    }

    // a monomial denominator is folded into the numerator
    fn absorb(self) -> Self {
        if self.num.is_zero() {
            return Self::from_poly(MPoly::zero());
        }
        if let Some((m, c)) = self.den.single_term() {
            let inv_m: Monomial = m.iter().map(|e| -e).collect();
            let mut scale = MPoly::zero();
            scale.terms.insert(trim(inv_m), c.inv().expect("nonzero"));
            return SymFrac { num: self.num * scale, den: MPoly::constant(Field::one()) };
        }
        self
    }

    pub fn eval(&self, point: &[Scalar]) -> Option<Scalar> {
        self.num.eval(point)?.checked_div(&self.den.eval(point)?)
    }

    pub fn format(&self, names: &[String]) -> String {
        let n = self.num.format(names);
        if self.den.single_term().is_some_and(|(m, c)| m.is_empty() && *c == Field::one()) {
            n
        } else {
            format!("({n})/({})", self.den.format(names))
        }
    }
}

impl PartialEq for SymFrac {
    fn eq(&self, o: &Self) -> bool {
        self.num.clone() * o.den.clone() == o.num.clone() * self.den.clone()
    }
}

impl Add for SymFrac {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        if self.den == o.den {
            return SymFrac::ratio(self.num + o.num, self.den);
        }
        SymFrac::ratio(self.num * o.den.clone() + o.num * self.den.clone(), self.den * o.den)
    }
}

impl Sub for SymFrac {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Neg for SymFrac {
    type Output = Self;
    fn neg(self) -> Self {
        SymFrac { num: -self.num, den: self.den }
    }
}

impl Mul for SymFrac {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        SymFrac::ratio(self.num * o.num, self.den * o.den)
    }
}

impl Field for SymFrac {
    fn zero() -> Self {
        Self::from_poly(MPoly::zero())
    }
    fn one() -> Self {
        Self::from_poly(MPoly::constant(Field::one()))
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    fn inv(&self) -> Option<Self> {
        if self.num.is_zero() {
            None
        } else {
            Some(SymFrac::ratio(self.den.clone(), self.num.clone()))
        }
    }
    fn from_scalar(q: &Scalar) -> Self {
        Self::from_poly(MPoly::constant(q.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cross_multiplied_equality() {
        let x = SymFrac::var(0);
        let y = SymFrac::var(1);
        let one = SymFrac::one();
        // (x^2 - y^2)/(x - y) == x + y
        let a = (x.clone() * x.clone() - y.clone() * y.clone()).checked_div(&(x.clone() - y.clone())).unwrap();
        assert_eq!(a, x.clone() + y.clone());
        // x^-1 kept as a Laurent monomial
        let xi = x.inv().unwrap();
        assert_eq!(xi.den(), &MPoly::constant(Field::one()));
        assert_eq!(xi * x.clone(), one.clone());
        assert_ne!(x.clone(), y);
        let names: Vec<String> = vec!["λ".into(), "w".into()];
        assert_eq!(SymFrac::var(1).format(&names), "w");
    }
}
