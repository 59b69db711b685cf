//! Scalar abstraction for the numerical kernels.
//!
//! All core math is written against [`Scalar`] so the same code runs in f64
//! (the default precision, used by the CLI and the reference values) and in
//! f32. Tolerances are tied to the scalar type because a check that is
//! meaningful at 1e-12 in f64 is unreachable in f32.

use std::fmt;
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Real scalar type underlying all state amplitudes and weights.
pub trait Scalar:
    Float
    + FloatConst
    + NumAssign
    + FromPrimitive
    + Sum<Self>
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
{
    /// Absolute tolerance for unit-norm, unit-trace and Hermiticity checks.
    const UNIT_TOL: Self;
    /// How far below zero an eigenvalue of a positive operator may sit
    /// before it counts as a positivity violation.
    const POSITIVITY_TOL: Self;
    /// Relative cutoff below which channel weights are truncated.
    const WEIGHT_CUTOFF: Self;

    /// Shorthand for converting literal constants.
    fn cast(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    fn from_index(n: usize) -> Self {
        Self::from_usize(n).expect("index fits in scalar")
    }
}

impl Scalar for f64 {
    const UNIT_TOL: f64 = 1e-12;
    const POSITIVITY_TOL: f64 = 1e-10;
    const WEIGHT_CUTOFF: f64 = 1e-14;
}

impl Scalar for f32 {
    const UNIT_TOL: f32 = 1e-4;
    const POSITIVITY_TOL: f32 = 1e-3;
    const WEIGHT_CUTOFF: f32 = 1e-6;
}

/// Unit phasor `exp(i theta)`.
pub fn phase<T: Scalar>(theta: T) -> Complex<T> {
    Complex::new(theta.cos(), theta.sin())
}

/// Wrap a coordinate onto the unit torus `[0, 1)`.
pub fn wrap_unit<T: Scalar>(x: T) -> T {
    let f = x.fract();
    let f = if f < T::zero() { f + T::one() } else { f };
    // fract of a tiny negative number can round back up to exactly 1.0
    if f >= T::one() {
        f - T::one()
    } else {
        f
    }
}

/// Distance between two points on the unit circle (minimum image).
pub fn circle_distance<T: Scalar>(a: T, b: T) -> T {
    let d = (wrap_unit(a) - wrap_unit(b)).abs();
    d.min(T::one() - d)
}
