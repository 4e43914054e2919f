//! Scalar abstraction for the numeric kernels.
//!
//! Everything that manipulates weights, passage values, or cumulant
//! generating functions is generic over [`Real`]. `f64` is the default
//! throughout the crate; `f32` works for memory-bound sweeps at reduced
//! precision. Concrete aliases live at the crate root.

use std::fmt;

/// Floating-point scalar: `f32` or `f64`.
pub trait Real:
    num_traits::Float
    + num_traits::FromPrimitive
    + num_traits::ToPrimitive
    + num_traits::NumAssign
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from `f64`, used when realizing draws from the
    /// 64-bit generator stream.
    fn from_f64_lossy(x: f64) -> Self {
        <Self as num_traits::FromPrimitive>::from_f64(x).expect("finite f64 converts")
    }

    /// Widening conversion used by the statistics layer, which always
    /// accumulates in `f64`.
    fn to_f64_lossy(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).expect("scalar converts to f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}
