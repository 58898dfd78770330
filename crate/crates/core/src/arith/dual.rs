use std::ops::{Add, Mul, Neg, Sub};

use super::field::{Field, Scalar};

/// `value + derivative·ε` with ε² = 0, over any coefficient field.
///
/// Running an algorithm over `Dual<F>` with one input seeded by ε yields the
/// exact directional derivative of its output.
#[derive(Clone, Debug, PartialEq)]
pub struct Dual<F: Field> {
    pub value: F,
    pub deriv: F,
}

/// Dual numbers over λ-rational functions.
pub type DualScalar = Dual<super::ratfunc::RatLambda>;

impl<F: Field> Dual<F> {
    pub fn new(value: F, deriv: F) -> Self {
        Dual { value, deriv }
    }

    pub fn constant(value: F) -> Self {
        Dual { value, deriv: F::zero() }
    }

    pub fn variable(value: F) -> Self {
        Dual { value, deriv: F::one() }
    }
}

impl<F: Field> Add for Dual<F> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Dual::new(self.value + o.value, self.deriv + o.deriv)
    }
}

impl<F: Field> Sub for Dual<F> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Dual::new(self.value - o.value, self.deriv - o.deriv)
    }
}

impl<F: Field> Neg for Dual<F> {
    type Output = Self;
    fn neg(self) -> Self {
        Dual::new(-self.value, -self.deriv)
    }
}

impl<F: Field> Mul for Dual<F> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let d = self.value.clone() * o.deriv + self.deriv * o.value.clone();
        Dual::new(self.value * o.value, d)
    }
}

impl<F: Field> Field for Dual<F> {
    fn zero() -> Self {
        Dual::constant(F::zero())
    }
    fn one() -> Self {
        Dual::constant(F::one())
    }
    fn is_zero(&self) -> bool {
        self.value.is_zero() && self.deriv.is_zero()
    }
    /// Defined iff the value part is invertible.
    fn inv(&self) -> Option<Self> {
        let vi = self.value.inv()?;
        let d = -(self.deriv.clone() * vi.clone() * vi.clone());
        Some(Dual::new(vi, d))
    }
    fn from_scalar(q: &Scalar) -> Self {
        Dual::constant(F::from_scalar(q))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::field::int;
    use crate::arith::poly::Poly;
    use proptest::prelude::*;

    proptest! {
        // derivative part of p(x + ε) equals p'(x)
        #[test]
        fn chain_rule_on_polynomials(c in proptest::collection::vec(-9i64..9, 1..6), x in -5i64..5) {
            let p = Poly::new(c.iter().map(|&v| int(v)).collect());
            let dx = Dual::variable(int(x));
            let mut acc = Dual::<Scalar>::zero();
            for coef in p.coeffs().iter().rev() {
                acc = acc * dx.clone() + Dual::constant(coef.clone());
            }
            prop_assert_eq!(acc.value, p.eval(&int(x)));
            prop_assert_eq!(acc.deriv, p.derivative().eval(&int(x)));
        }
    }

    #[test]
    fn division_needs_nonzero_value() {
        assert!(Dual::new(int(0), int(1)).inv().is_none());
        let q = Dual::new(int(2), int(3)).inv().unwrap();
        assert_eq!(q, Dual::new(crate::arith::field::frac(1, 2), crate::arith::field::frac(-3, 4)));
    }
}
