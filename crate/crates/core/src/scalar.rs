//! Floating-point abstraction for the numeric kernel.
//!
//! State vectors, success-probability formulas and the statistics helpers are
//! generic over [`Scalar`] so they can run in `f32` or `f64`. Concrete aliases
//! for the common instantiations live at the crate root.

use std::fmt;
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Floating-point scalar usable by the simulation kernel.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + NumAssign + Sum + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    /// Tolerance for treating a state vector's squared norm as 1.
    fn unit_norm_tolerance() -> Self;

    /// Converts a domain size or counter, panicking only if the value cannot
    /// be represented at all (usize always fits in an f32/f64 approximation).
    fn from_count(v: usize) -> Self {
        Self::from_usize(v).expect("count representable as scalar")
    }
}

impl Scalar for f32 {
    fn unit_norm_tolerance() -> Self {
        1e-4
    }
}

impl Scalar for f64 {
    fn unit_norm_tolerance() -> Self {
        1e-9
    }
}
