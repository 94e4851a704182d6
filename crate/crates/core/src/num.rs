//! Scalar abstraction over the floating-point types the library runs on.

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use rustfft::FftNum;
use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

/// Floating-point scalar the numerical core is generic over.
///
/// `f64` is the working type for everything tolerance-critical; `f32` is
/// supported for cheap exploratory runs.
pub trait Scalar:
    Float
    + FloatConst
    + NumAssign
    + FromPrimitive
    + ToPrimitive
    + FftNum
    + Sum
    + Display
    + LowerExp
    + Debug
    + Send
    + Sync
    + 'static
{
    /// Shorthand for lossy conversion from `f64` literals and intermediates.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 -> Scalar conversion")
    }

    /// Lossy widening to `f64` for RNG plumbing and reporting.
    fn as_f64(self) -> f64 {
        self.to_f64().expect("Scalar -> f64 conversion")
    }

    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("usize -> Scalar conversion")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
