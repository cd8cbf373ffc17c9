//! Scalar abstraction shared by every numeric module.

use nalgebra::RealField;
use num_traits::ToPrimitive;
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Real floating-point scalar: `f32` or `f64`.
///
/// Everything numeric in the crate (contingency tables, CA, tf-idf weights,
/// similarities, recommendation scores) is generic over this trait.
pub trait Real:
    RealField + Copy + ToPrimitive + Serialize + DeserializeOwned + Default + Send + Sync + 'static
{
    /// Literal conversion from `f64`.
    #[inline]
    fn lit(x: f64) -> Self {
        <Self as num_traits::FromPrimitive>::from_f64(x).expect("f64 literal representable")
    }

    /// Conversion from a count.
    #[inline]
    fn from_count(n: usize) -> Self {
        <Self as num_traits::FromPrimitive>::from_usize(n).expect("count representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}
