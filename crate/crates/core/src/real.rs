//! Scalar abstraction shared by the floating-point kernels.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use rustfft::FftNum;

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + FftNum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("f64 converts to every Real")
    }

    #[inline]
    fn of_usize(v: usize) -> Self {
        Self::from_usize(v).expect("usize converts to every Real")
    }

    #[inline]
    fn f64(self) -> f64 {
        self.to_f64().expect("every Real converts to f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Ordered field used by the closed-form classifiers: `f64` or an exact
/// rational such as `Ratio<i64>`.
pub trait Field: num_traits::Num + PartialOrd + Copy + Debug {
    fn from_ratio(num: i64, den: i64) -> Self;
    fn as_f64(&self) -> f64;
}

impl Field for f64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn as_f64(&self) -> f64 {
        *self
    }
}

impl Field for f32 {
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f32 / den as f32
    }
    fn as_f64(&self) -> f64 {
        *self as f64
    }
}

impl Field for num_rational::Ratio<i64> {
    fn from_ratio(num: i64, den: i64) -> Self {
        num_rational::Ratio::new(num, den)
    }
    fn as_f64(&self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
}
