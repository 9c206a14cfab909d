//! Scalar abstraction: the numeric type the whole crate is generic over.

use std::fmt;

/// Floating-point scalar: `f32` or `f64`.
pub trait Real:
    num_traits::Float
    + num_traits::FloatConst
    + num_traits::FromPrimitive
    + num_traits::ToPrimitive
    + std::ops::AddAssign
    + std::ops::SubAssign
    + std::ops::MulAssign
    + fmt::Debug
    + fmt::Display
    + fmt::LowerExp
    + Send
    + Sync
    + 'static
{
    /// Shorthand for converting an `f64` constant.
    fn of(x: f64) -> Self {
        num_traits::FromPrimitive::from_f64(x).expect("finite f64 literal")
    }

    /// Lossy conversion to `f64`, for reporting and error messages.
    fn as_f64(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}
