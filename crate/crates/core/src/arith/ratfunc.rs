use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::field::{fmt_scalar, parse_scalar, Field, Scalar};
use super::poly::Poly;
use crate::error::{Error, Result};

/// Univariate rational function in normal form: coprime numerator and
/// denominator, monic denominator, zero stored as `0/1`.
///
/// Because the normal form is canonical, `==` is value equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFunc<F: Field> {
    num: Poly<F>,
    den: Poly<F>,
}

/// Rational function of the spectral parameter λ over the rationals.
pub type RatLambda = RatFunc<Scalar>;

impl<F: Field> RatFunc<F> {
    pub fn new(num: Poly<F>, den: Poly<F>) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if num.is_zero() {
            return Ok(Self::from_poly(Poly::zero()));
        }
        let g = Poly::gcd(&num, &den);
        let (num, _) = num.div_rem(&g)?;
        let (den, _) = den.div_rem(&g)?;
        let l = den.lead().cloned().expect("nonzero").inv().expect("nonzero");
        Ok(RatFunc { num: num.scale(&l), den: den.scale(&l) })
    }

    pub fn from_poly(p: Poly<F>) -> Self {
        RatFunc { num: p, den: Poly::one() }
    }

    pub fn constant(c: F) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    /// The indeterminate λ.
    pub fn lambda() -> Self {
        Self::from_poly(Poly::x())
    }

    /// `c·λ^k` for any integer k.
    pub fn laurent_monomial(c: F, k: i64) -> Self {
        if c.is_zero() {
            return Self::from_poly(Poly::zero());
        }
        if k >= 0 {
            Self::from_poly(Poly::monomial(c, k as usize))
        } else {
            RatFunc { num: Poly::constant(c), den: Poly::monomial(F::one(), k.unsigned_abs() as usize) }
        }
    }

    pub fn num(&self) -> &Poly<F> {
        &self.num
    }

    pub fn den(&self) -> &Poly<F> {
        &self.den
    }

    pub fn eval(&self, t: &F) -> Result<F> {
        let d = self.den.eval(t);
        if d.is_zero() {
            return Err(Error::Pole);
        }
        Ok(self.num.eval(t).checked_div(&d).expect("nonzero"))
    }

    pub fn derivative(&self) -> Self {
        let n = self.num.derivative() * self.den.clone() - self.num.clone() * self.den.derivative();
        let d = self.den.clone() * self.den.clone();
        Self::new(n, d).expect("nonzero denominator")
    }

    /// f(−λ)
    pub fn negate_var(&self) -> Self {
        Self::new(self.num.negate_var(), self.den.negate_var()).expect("nonzero denominator")
    }

    /// f(1/λ)
    pub fn invert_var(&self) -> Self {
        let dn = self.num.degree().unwrap_or(0);
        let dd = self.den.degree().unwrap_or(0);
        let d = dn.max(dd);
        Self::new(self.num.reversed(d), self.den.reversed(d)).expect("nonzero denominator")
    }

    /// If the value is `c·λ^k`, returns `(c, k)`.
    pub fn as_laurent_monomial(&self) -> Option<(F, i64)> {
        if self.num.is_zero() {
            return None;
        }
        let nv = self.num.valuation();
        let dv = self.den.valuation();
        let n_mono = self.num.degree() == Some(nv);
        let d_mono = self.den.degree() == Some(dv);
        if n_mono && d_mono {
            Some((self.num.coeff(nv), nv as i64 - dv as i64))
        } else {
            None
        }
    }
}

impl<F: Field> Add for RatFunc<F> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        if self.den == o.den {
            return Self::new(self.num + o.num, self.den).expect("nonzero");
        }
        Self::new(self.num * o.den.clone() + o.num * self.den.clone(), self.den * o.den).expect("nonzero")
    }
}

impl<F: Field> Sub for RatFunc<F> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl<F: Field> Neg for RatFunc<F> {
    type Output = Self;
    fn neg(self) -> Self {
        RatFunc { num: -self.num, den: self.den }
    }
}

impl<F: Field> Mul for RatFunc<F> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(self.num * o.num, self.den * o.den).expect("nonzero")
    }
}

impl<F: Field> Field for RatFunc<F> {
    fn zero() -> Self {
        Self::from_poly(Poly::zero())
    }
    fn one() -> Self {
        Self::from_poly(Poly::one())
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    fn inv(&self) -> Option<Self> {
        if self.num.is_zero() {
            None
        } else {
            Some(Self::new(self.den.clone(), self.num.clone()).expect("nonzero"))
        }
    }
    fn from_scalar(q: &Scalar) -> Self {
        Self::constant(F::from_scalar(q))
    }
}

impl<F: Field> fmt::Debug for RatFunc<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?})/({:?})", self.num.coeffs(), self.den.coeffs())
    }
}

fn fmt_poly(p: &Poly<Scalar>) -> String {
    let mut terms = Vec::new();
    for (k, c) in p.coeffs().iter().enumerate().rev() {
        if Field::is_zero(c) {
            continue;
        }
        let cs = fmt_scalar(c);
        let t = match k {
            0 => cs,
            1 if cs == "1" => "λ".to_string(),
            1 if cs == "-1" => "-λ".to_string(),
            1 => format!("{cs}·λ"),
            _ if cs == "1" => format!("λ^{k}"),
            _ if cs == "-1" => format!("-λ^{k}"),
            _ => format!("{cs}·λ^{k}"),
        };
        terms.push(t);
    }
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ").replace("+ -", "- ")
    }
}

impl fmt::Display for RatLambda {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.degree() == Some(0) {
            write!(f, "{}", fmt_poly(&self.num))
        } else {
            write!(f, "({})/({})", fmt_poly(&self.num), fmt_poly(&self.den))
        }
    }
}

/// Coefficient list of a polynomial as rational strings, lowest degree first.
pub fn poly_to_strings(p: &Poly<Scalar>) -> Vec<String> {
    p.coeffs().iter().map(fmt_scalar).collect()
}

pub fn poly_from_strings<S: AsRef<str>>(v: &[S]) -> Result<Poly<Scalar>> {
    Ok(Poly::new(v.iter().map(|s| parse_scalar(s.as_ref())).collect::<Result<Vec<_>>>()?))
}

impl RatLambda {
    /// `(numerator coefficients, denominator coefficients)` as strings.
    pub fn to_coeff_strings(&self) -> (Vec<String>, Vec<String>) {
        (poly_to_strings(&self.num), poly_to_strings(&self.den))
    }

    pub fn from_coeff_strings<S: AsRef<str>>(num: &[S], den: &[S]) -> Result<Self> {
        Self::new(poly_from_strings(num)?, poly_from_strings(den)?)
    }

    /// `"[n0,n1,…]/[d0,d1,…]"`
    pub fn to_list_string(&self) -> String {
        let (n, d) = self.to_coeff_strings();
        format!("[{}]/[{}]", n.join(","), d.join(","))
    }
}
