//! Floating-point abstraction shared by the decoder, channel and Bethe code.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive};

/// Real scalar the message-passing kernels are written against.
///
/// Implemented for `f32` and `f64`. The two constants below differ per type
/// because the `tanh` saturation bound has to be representable below one.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Largest magnitude a message is allowed to take.
    const CLAMP: f64 = 19.0;

    /// Bound applied to a product of `tanh` values before `atanh`.
    fn tanh_bound() -> Self;

    #[inline]
    fn clamp_limit() -> Self {
        Self::lit(Self::CLAMP)
    }

    /// Converts an `f64` literal. Never fails for the supported types.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn clamp_message(self) -> Self {
        let c = Self::clamp_limit();
        self.max(-c).min(c)
    }
}

impl Scalar for f64 {
    #[inline]
    fn tanh_bound() -> Self {
        1.0 - 1e-12
    }
}

impl Scalar for f32 {
    #[inline]
    fn tanh_bound() -> Self {
        // 1 - 1e-12 rounds to 1.0 in single precision.
        1.0 - f32::EPSILON
    }
}

/// `atanh` with the argument mapped into `[-tanh_bound, tanh_bound]`.
#[inline]
pub fn clamped_atanh<T: Scalar>(x: T) -> T {
    let b = T::tanh_bound();
    x.max(-b).min(b).atanh()
}
