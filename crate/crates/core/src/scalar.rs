//! Real scalar abstraction shared by the numerical modules.
//!
//! Everything that touches amplitudes or matrix elements is generic over
//! [`Scalar`], implemented for `f32` and `f64`. The crate root re-exports
//! `f64` aliases for the common case.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Floating point type usable for amplitudes and matrix elements.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from `f64`, used for literals and stored angles.
    fn of(x: f64) -> Self;

    /// Widening conversion to `f64`.
    fn to_f64_lossless(self) -> f64;

    /// Machine epsilon scaled to something usable as a "numerically zero" cutoff.
    fn tiny() -> Self {
        Self::epsilon() * Self::of(64.0)
    }
}

impl Scalar for f32 {
    #[inline]
    fn of(x: f64) -> Self {
        x as f32
    }
    #[inline]
    fn to_f64_lossless(self) -> f64 {
        self as f64
    }
}

impl Scalar for f64 {
    #[inline]
    fn of(x: f64) -> Self {
        x
    }
    #[inline]
    fn to_f64_lossless(self) -> f64 {
        self
    }
}

/// Complex amplitude over a [`Scalar`].
pub type Cplx<T> = Complex<T>;

#[inline]
pub(crate) fn cplx<T: Scalar>(re: T, im: T) -> Cplx<T> {
    Complex::new(re, im)
}
