//! Coefficient fields the series algebra is generic over.
//!
//! The symbolic side only needs ring operations plus embedding of rationals;
//! integrals against the Gaussian weight additionally need square roots of
//! rationals, which is what [`RadicalScalar`] adds. Floating point types
//! implement both (approximately), [`BigRational`] is exact but has no
//! radicals, and [`Surd`](crate::Surd) is exact with radicals.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, ToPrimitive, Zero};

/// Ring of series coefficients.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    fn from_rational(r: &BigRational) -> Self;

    fn to_f64(&self) -> f64;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_rational(&BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    fn from_int(n: i64) -> Self {
        Self::from_rational(&BigRational::from_integer(BigInt::from(n)))
    }
}

/// Coefficient field closed under square roots of positive rationals.
pub trait RadicalScalar: Scalar {
    /// `sqrt(num / den)`.
    fn sqrt_ratio(num: u64, den: u64) -> Self;
}

/// Floating point types used by the numerical side (ODE and PDE integration).
pub trait Real: num_traits::Float + FromPrimitive + Debug + Send + Sync + 'static {
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}

macro_rules! impl_float_scalar {
    ($f:ty) => {
        impl Scalar for $f {
            fn from_rational(r: &BigRational) -> Self {
                ToPrimitive::to_f64(r).unwrap_or(f64::NAN) as $f
            }

            fn to_f64(&self) -> f64 {
                *self as f64
            }
        }

        impl RadicalScalar for $f {
            fn sqrt_ratio(num: u64, den: u64) -> Self {
                ((num as f64) / (den as f64)).sqrt() as $f
            }
        }
    };
}

impl_float_scalar!(f32);
impl_float_scalar!(f64);

impl Scalar for BigRational {
    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// Converts a finite `f64` to the exact rational it represents.
pub fn rational_from_f64(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}
