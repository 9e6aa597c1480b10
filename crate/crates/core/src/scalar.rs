//! Scalar abstraction shared by the cumulant calculus.
//!
//! Set functions and cumulants are computed either in exact arithmetic
//! (`BigRational`, or `Complex<BigRational>` for Fourier data) or in `f64`.
//! The mode is the type parameter; everything downstream is written against
//! this one trait.

use num::complex::Complex;
use num::{BigRational, One, Zero};
use std::ops::{Neg, Sub};

/// Ring operations needed by the partition sums.
pub trait Scalar:
    Clone + PartialEq + Zero + One + Neg<Output = Self> + Sub<Output = Self> + std::fmt::Debug
{
}

impl<T> Scalar for T where
    T: Clone + PartialEq + Zero + One + Neg<Output = T> + Sub<Output = T> + std::fmt::Debug
{
}

/// Complex numbers with exact rational parts; the value type of torus moments.
pub type ComplexRational = Complex<BigRational>;

/// Exact rational from an `f64` (every finite double is a dyadic rational).
pub fn rational_from_f64(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

pub fn rational_to_f64(x: &BigRational) -> f64 {
    use num::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

/// Kahan compensated summation, used wherever floating-point sums must be
/// reproducible across run orders that we keep fixed.
pub fn kahan_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let y = v - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigInt;

    #[test]
    fn f64_roundtrips_through_rational() {
        for x in [0.5, -1.25, 3.0, 0.1] {
            assert_eq!(rational_to_f64(&rational_from_f64(x)), x);
        }
    }

    #[test]
    fn kahan_handles_magnitude_spread() {
        let vals = vec![1e16, 1.0, -1e16, 1.0];
        assert_eq!(kahan_sum(vals), 2.0);
    }

    #[test]
    fn complex_rational_is_a_scalar() {
        fn assert_scalar<T: crate::scalar::Scalar>() {}
        assert_scalar::<ComplexRational>();
        assert_scalar::<BigRational>();
        assert_scalar::<f64>();
        let one = ComplexRational::new(
            BigRational::from(BigInt::from(1)),
            BigRational::from(BigInt::from(0)),
        );
        assert!(one.is_one());
    }
}
