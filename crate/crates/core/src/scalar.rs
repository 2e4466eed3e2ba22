//! Scalar abstraction for all numeric computation.
//!
//! Every solver in this crate is generic over a floating-point type.
//! The crate root re-exports f64 aliases, which is what the CLI and
//! most callers want; f32 works for experimentation at reduced
//! precision.

use std::fmt;
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// A floating-point scalar usable by the solvers. Blanket-implemented;
/// do not implement manually.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + Sum<Self> + fmt::Debug + fmt::Display + Default + 'static
{
}

impl<T> Real for T where
    T: Float + FromPrimitive + ToPrimitive + Sum<T> + fmt::Debug + fmt::Display + Default + 'static
{
}

/// Converts an f64 constant (tolerances, probabilities from files) into
/// the working scalar type. Panics only if the scalar type cannot
/// represent ordinary constants, which no floating-point type hits.
pub fn real<S: Real>(x: f64) -> S {
    S::from_f64(x).expect("scalar type cannot represent an f64 constant")
}
