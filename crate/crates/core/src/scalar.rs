//! Scalar abstraction shared by every numerical routine in the crate.

use nalgebra::RealField;
use num_traits::ToPrimitive;

/// Real scalar the toolkit is generic over (`f32`, `f64`).
///
/// Everything nalgebra needs comes from [`RealField`]; the conversion helpers
/// keep literal constants readable inside generic code.
pub trait Real: RealField + Copy + ToPrimitive {
    /// Converts an `f64` literal into the scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        nalgebra::convert(x)
    }

    /// Lossy conversion used for reporting.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Converts an index or count.
    #[inline]
    fn of_usize(k: usize) -> Self {
        nalgebra::convert(k as f64)
    }
}

impl<T: RealField + Copy + ToPrimitive> Real for T {}
