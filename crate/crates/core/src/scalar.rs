//! Scalar abstraction shared by every numeric module.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real floating point type the spectral routines are generic over (`f32` or `f64`).
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal. Panics only for values not representable at all.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal not representable in scalar type")
    }

    #[inline]
    fn from_int(i: i64) -> Self {
        Self::from_i64(i).expect("integer not representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Largest exponent `x` for which `exp(x)` is guarded as safe.
    fn exp_guard() -> Self {
        let natural = Self::max_value().ln() * Self::lit(0.95);
        natural.min(Self::lit(700.0))
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// `<a, z>` for a real vector and an integer offset.
pub fn dot_offset<T: Scalar>(alpha: &[T], z: &[i64]) -> T {
    debug_assert_eq!(alpha.len(), z.len());
    alpha
        .iter()
        .zip(z)
        .fold(T::zero(), |acc, (&a, &k)| acc + a * T::from_int(k))
}

pub fn norm2<T: Scalar>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |acc, &x| acc + x * x).sqrt()
}
