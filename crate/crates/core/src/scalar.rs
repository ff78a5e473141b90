//! Scalar abstraction shared by every numerical routine in the crate.

use num_complex::Complex;
use num_traits::{Float, FloatConst, NumCast, ToPrimitive};
use rustfft::FftNum;
use std::fmt::{Debug, Display, LowerExp};

/// Real floating-point type the library is generic over (`f32` or `f64`).
///
/// `Float` and `FftNum` both bring an `abs` method into scope; call
/// [`abs`] (or `Float::abs`) instead of the method form on generic values.
pub trait Real:
    Float + FloatConst + FftNum + Default + Display + LowerExp + Debug + Send + Sync + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex number over the crate scalar.
pub type Cx<T> = Complex<T>;

/// Converts an `f64` literal into the working precision.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    <T as NumCast>::from(x).expect("literal representable in working precision")
}

#[inline]
pub fn from_usize<T: Real>(x: usize) -> T {
    <T as NumCast>::from(x).expect("integer representable in working precision")
}

#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    ToPrimitive::to_f64(&x).unwrap_or(f64::NAN)
}

#[inline]
pub fn abs<T: Real>(x: T) -> T {
    Float::abs(x)
}

#[inline]
pub fn cx<T: Real>(re: f64, im: f64) -> Cx<T> {
    Complex::new(lit(re), lit(im))
}

#[inline]
pub fn czero<T: Real>() -> Cx<T> {
    Complex::new(T::zero(), T::zero())
}

#[inline]
pub fn cone<T: Real>() -> Cx<T> {
    Complex::new(T::one(), T::zero())
}

#[inline]
pub fn creal<T: Real>(x: T) -> Cx<T> {
    Complex::new(x, T::zero())
}

/// `exp(iθ)`.
#[inline]
pub fn unit<T: Real>(theta: T) -> Cx<T> {
    Complex::new(theta.cos(), theta.sin())
}

/// Lossy conversion between working precisions.
#[inline]
pub fn cast_cx<S: Real, T: Real>(z: Cx<S>) -> Cx<T> {
    Complex::new(lit(to_f64(z.re)), lit(to_f64(z.im)))
}
