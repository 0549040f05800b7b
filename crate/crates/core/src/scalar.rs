//! Scalar abstraction: every numeric kernel in this crate is generic over a
//! floating-point type, with `f64` aliases exported from the crate root.

use std::fmt;
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar for cascade math: `f32` or `f64`.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + Sum + fmt::Debug + fmt::Display + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: Float + FromPrimitive + ToPrimitive + Sum + fmt::Debug + fmt::Display + Send + Sync + 'static
{
}

/// Widens an event count into the scalar type.
#[inline]
pub fn from_count<T: Real>(count: usize) -> T {
    T::from_usize(count).expect("count representable as float")
}

/// Widens a follower (or other u64) count into the scalar type.
#[inline]
pub fn from_u64<T: Real>(value: u64) -> T {
    T::from_u64(value).expect("u64 representable as float")
}

/// Converts an `f64` constant into the scalar type.
#[inline]
pub fn from_f64<T: Real>(value: f64) -> T {
    T::from_f64(value).expect("f64 representable as float")
}
