//! Scalar abstraction: all numerics are generic over the floating type.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating-point scalar the simulation is generic over: `f32` or `f64`.
///
/// `FftNum` is included so grids of this scalar can go straight through
/// the FFT machinery without extra bounds at call sites.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Send
    + Sync
    + rustfft::FftNum
    + 'static
{
    /// Lossy conversion from `f64` literals; panics only for non-finite
    /// values that the target type cannot represent, which no caller passes.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 converts to any Real")
    }

    /// Conversion to `f64` (exact for f64, widening for f32).
    fn to64(self) -> f64 {
        self.to_f64().expect("Real converts to f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}
