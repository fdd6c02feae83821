//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar backing amplitudes and matrix entries.
///
/// Implemented for `f32` and `f64`. Random draws are always produced in `f64`
/// and narrowed, so a given seed yields the same experiment at either precision.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Tolerance for the normalization and unitarity invariants.
    const TOLERANCE: f64;

    fn from_f64_lossy(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 converts to every Real scalar")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("Real scalars convert to f64")
    }
}

impl Real for f64 {
    const TOLERANCE: f64 = 1e-9;
}

impl Real for f32 {
    const TOLERANCE: f64 = 1e-5;
}

/// Shorthand for `T::from_f64_lossy`.
#[inline]
pub(crate) fn lit<T: Real>(x: f64) -> T {
    T::from_f64_lossy(x)
}
