//! Scalar abstraction: the toolkit is generic over the floating-point type.
//!
//! Everything numeric is written against [`Scalar`], which is implemented for
//! `f32` and `f64`. Concrete aliases for the main containers live at the crate
//! root. File payloads are pinned to 32-bit reals by the container format
//! regardless of the in-memory scalar.

use num_traits::{Float, FloatConst, FromPrimitive};
use rustfft::FftNum;

/// Floating-point scalar usable throughout the toolkit: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + FftNum + std::iter::Sum + std::fmt::Display
{
    /// Lossy conversion back to `f64` for reporting and file headers.
    fn to_f64(self) -> f64;
}

impl Scalar for f32 {
    fn to_f64(self) -> f64 {
        self as f64
    }
}

impl Scalar for f64 {
    fn to_f64(self) -> f64 {
        self
    }
}

/// Speed of light in mm/s. Lengths in this crate are millimeters throughout.
pub const C_MM_PER_S: f64 = 2.99792458e11;

/// Convert an `f64` constant into the working scalar type.
#[inline]
pub fn real<T: Scalar>(v: f64) -> T {
    T::from_f64(v).expect("f64 constant representable in scalar type")
}
