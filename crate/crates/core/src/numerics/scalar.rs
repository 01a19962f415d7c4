use core::fmt::Debug;
use core::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex64;

/// Field element stored in a [`DenseMatrix`](super::DenseMatrix): `f64` or
/// `Complex64`.
pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + 'static
{
    const IS_COMPLEX: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_real(x: f64) -> Self;
    fn real_part(self) -> f64;
    fn imag_part(self) -> f64;
    fn conjugate(self) -> Self;
    fn magnitude(self) -> f64;
    fn magnitude_sqr(self) -> f64;

    fn is_finite_value(self) -> bool {
        self.real_part().is_finite() && self.imag_part().is_finite()
    }
}

impl Scalar for f64 {
    const IS_COMPLEX: bool = false;

    #[inline]
    fn zero() -> Self {
        0.0
    }
    #[inline]
    fn one() -> Self {
        1.0
    }
    #[inline]
    fn from_real(x: f64) -> Self {
        x
    }
    #[inline]
    fn real_part(self) -> f64 {
        self
    }
    #[inline]
    fn imag_part(self) -> f64 {
        0.0
    }
    #[inline]
    fn conjugate(self) -> Self {
        self
    }
    #[inline]
    fn magnitude(self) -> f64 {
        num_traits::Float::abs(self)
    }
    #[inline]
    fn magnitude_sqr(self) -> f64 {
        self * self
    }
}

impl Scalar for Complex64 {
    const IS_COMPLEX: bool = true;

    #[inline]
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    #[inline]
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    #[inline]
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    #[inline]
    fn real_part(self) -> f64 {
        self.re
    }
    #[inline]
    fn imag_part(self) -> f64 {
        self.im
    }
    #[inline]
    fn conjugate(self) -> Self {
        self.conj()
    }
    #[inline]
    fn magnitude(self) -> f64 {
        self.norm()
    }
    #[inline]
    fn magnitude_sqr(self) -> f64 {
        self.norm_sqr()
    }
}
