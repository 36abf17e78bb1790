//! Scalar abstractions shared by the real-valued monoids, spaces and the integral solver.
//!
//! Everything that only needs ordered-field arithmetic is generic over [`Scalar`], so it runs
//! on `f32`, `f64` and exact rationals alike. Code that needs transcendental functions or
//! IEEE behaviour (quadrature, overflow detection) asks for [`Real`] instead.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{Float, FromPrimitive, Num, Signed, ToPrimitive};

/// An ordered field element: `f32`, `f64`, or an exact rational.
pub trait Scalar:
    Num + Signed + PartialOrd + Clone + Debug + Display + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// `2^-exp` as an exact dyadic value.
    fn dyadic(exp: u32) -> Self {
        let mut v = Self::one();
        let two = Self::one() + Self::one();
        for _ in 0..exp {
            v = v / two.clone();
        }
        v
    }

    /// `num / den`, exact for rationals.
    fn ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num).expect("integer fits scalar") / Self::from_i64(den).expect("integer fits scalar")
    }

    fn max_of(a: &Self, b: &Self) -> Self {
        if a >= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    fn min_of(a: &Self, b: &Self) -> Self {
        if a <= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    /// Lossy view used only for diagnostics and the eigenvalue oracle.
    fn approx_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Scalar for T where
    T: Num + Signed + PartialOrd + Clone + Debug + Display + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
}

/// Floating point scalars.
pub trait Real: Scalar + Float {
    fn from_f64_lossy(v: f64) -> Self {
        <Self as FromPrimitive>::from_f64(v).expect("finite float converts")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Exact scalar used by property tests that must not see rounding.
pub type Exact = BigRational;

/// Builds an exact rational from small integers.
pub fn exact(num: i64, den: i64) -> Exact {
    Ratio::new(BigInt::from(num), BigInt::from(den))
}
