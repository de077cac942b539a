//! Scalar abstraction: all simulation math is generic over `f32`/`f64`.

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar used throughout the simulator.
///
/// Implemented for `f32` and `f64`. Concrete type aliases at the crate
/// root fix `f64` as the default precision.
pub trait Scalar:
    Float
    + FromPrimitive
    + core::fmt::Debug
    + core::fmt::Display
    + core::fmt::LowerExp
    + core::iter::Sum
    + Send
    + Sync
    + 'static
{
    /// Convert a literal or config value into the working precision.
    #[inline]
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("finite f64 literal")
    }

    /// Widen to f64 (exact for f64, lossless for f32).
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar widens to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
