//! Scalar abstraction shared by every geometric routine in the crate.

use nalgebra as na;
use num_traits as nt;

/// Floating point type usable by the pose, map, scene and evaluation math.
///
/// Implemented for `f32` and `f64`. Methods such as `sqrt` or `atan2` come from
/// [`na::ComplexField`]/[`na::RealField`]; conversions go through
/// [`nt::FromPrimitive`] and [`nt::ToPrimitive`].
pub trait Real:
    na::RealField + Copy + nt::FromPrimitive + nt::ToPrimitive + nt::float::FloatConst + Default
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(value: f64) -> Self {
        <Self as nt::FromPrimitive>::from_f64(value).expect("finite literal")
    }

    /// Widen to `f64`.
    #[inline]
    fn as_f64(self) -> f64 {
        <Self as nt::ToPrimitive>::to_f64(&self).unwrap_or(f64::NAN)
    }

    #[inline]
    fn is_finite_real(self) -> bool {
        self.as_f64().is_finite()
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Convert between two [`Real`] types through `f64`.
#[inline]
pub fn cast<A: Real, B: Real>(value: A) -> B {
    B::lit(value.as_f64())
}
