//! Scalar abstraction and numerical building blocks shared by the physics
//! modules.

mod quadrature;
mod special;
mod vec3;

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

pub use quadrature::{integrate, integrate_panels, Quadrature};
pub use special::{bessel_i0e, bessel_j0, bessel_j1, ln_factorial};
pub use vec3::{Mat3, Vec3};

/// Floating-point scalar accepted by the physics modules.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + NumAssign
        + Sum
        + Debug
        + Display
        + Default
        + Send
        + Sync
        + 'static
{
}

/// Converts an `f64` literal into the working scalar.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in scalar type")
}

#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Power ratio to decibels.
#[inline]
pub fn to_db<T: Real>(ratio: T) -> T {
    lit::<T>(10.0) * ratio.log10()
}

/// Decibels to power ratio.
#[inline]
pub fn from_db<T: Real>(db: T) -> T {
    lit::<T>(10.0).powf(db / lit(10.0))
}

/// Smallest value the scalar type can meaningfully resolve as a relative
/// tolerance, floored at `requested`.
#[inline]
pub(crate) fn tolerance<T: Real>(requested: f64) -> T {
    lit::<T>(requested).max(T::epsilon() * lit(16.0))
}
