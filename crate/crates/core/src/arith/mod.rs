//! Exact arithmetic: rationals, univariate polynomials and rational
//! functions in λ, dual numbers, dense matrices, and symbolic fractions.

pub mod dual;
pub mod field;
pub mod matrix;
pub mod poly;
pub mod ratfunc;
pub mod symbolic;

pub use dual::{Dual, DualScalar};
pub use field::{fmt_scalar, frac, int, parse_scalar, Field, Scalar};
pub use matrix::Matrix;
pub use poly::Poly;
pub use ratfunc::{RatFunc, RatLambda};
pub use symbolic::{MPoly, SymFrac};

#[cfg(test)]
mod laws {
    use super::*;
    use proptest::prelude::*;

    fn small_scalar() -> impl Strategy<Value = Scalar> {
        (-20i64..20, 1i64..9).prop_map(|(n, d)| frac(n, d))
    }

    fn ratl() -> impl Strategy<Value = RatLambda> {
        (proptest::collection::vec(small_scalar(), 0..4), proptest::collection::vec(small_scalar(), 1..4))
            .prop_filter_map("nonzero denominator", |(n, d)| RatLambda::new(Poly::new(n), Poly::new(d)).ok())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn ratlambda_field_axioms(a in ratl(), b in ratl(), c in ratl()) {
            prop_assert_eq!((a.clone() + b.clone()) + c.clone(), a.clone() + (b.clone() + c.clone()));
            prop_assert_eq!((a.clone() * b.clone()) * c.clone(), a.clone() * (b.clone() * c.clone()));
            prop_assert_eq!(a.clone() * (b.clone() + c.clone()), a.clone() * b.clone() + a.clone() * c.clone());
            prop_assert_eq!(a.clone() - a.clone(), RatLambda::zero());
            if let Some(ai) = a.inv() {
                prop_assert_eq!(a.clone() * ai, RatLambda::one());
            }
            // normal form: monic denominator
            prop_assert_eq!(a.den().lead().cloned(), Some(<Scalar as Field>::one()));
        }

        #[test]
        fn eval_is_multiplicative(a in ratl(), b in ratl(), t in small_scalar()) {
            if let (Ok(x), Ok(y)) = (a.eval(&t), b.eval(&t)) {
                prop_assert_eq!((a * b).eval(&t).unwrap(), x * y);
            }
        }

        #[test]
        fn scalar_field_axioms(a in small_scalar(), b in small_scalar(), c in small_scalar()) {
            prop_assert_eq!(a.clone() * (b.clone() + c.clone()), a.clone() * b.clone() + a.clone() * c);
            if let Some(bi) = Field::inv(&b) {
                prop_assert_eq!(a.clone() * b * bi, a);
            }
        }
    }
}
