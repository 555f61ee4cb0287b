//! Scalar abstraction shared by every module.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point scalar the library is generic over (`f32` or `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into `Self`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Lossy conversion used for error payloads and serialization.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn two() -> Self {
        Self::one() + Self::one()
    }

    #[inline]
    fn half() -> Self {
        Self::lit(0.5)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_pi<T: Real>(x: T) -> T {
    let tau = T::TAU();
    let mut y = x - tau * ((x + T::PI()) / tau).floor();
    // floor puts y in [-pi, pi); move the closed end to +pi
    if y <= -T::PI() {
        y = y + tau;
    }
    y
}

/// Wraps an angle into `[0, period)`.
pub fn wrap_period<T: Real>(x: T, period: T) -> T {
    let y = x - period * (x / period).floor();
    if y >= period || y < T::zero() {
        T::zero()
    } else {
        y
    }
}

/// Smallest `eps` multiple safe to use as an absolute floor in relative comparisons.
pub(crate) fn tiny<T: Real>() -> T {
    T::min_positive_value().sqrt()
}
