//! Scalar abstraction shared by every numeric module.
//!
//! All math in this crate is written against [`Real`], so the same code runs
//! in `f64` (the default, see the aliases in the crate root) or `f32`.

use nalgebra::{Complex, RealField};
use num_traits::{FromPrimitive, ToPrimitive};

/// Real floating-point scalar: f32 or f64.
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive + Send + Sync + 'static {}

impl<T> Real for T where T: RealField + Copy + FromPrimitive + ToPrimitive + Send + Sync + 'static {}

/// Complex scalar over `T`.
pub type C<T> = Complex<T>;

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}

#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().expect("scalar convertible to f64")
}

#[inline]
pub fn cplx<T: Real>(re: T, im: T) -> C<T> {
    Complex::new(re, im)
}

#[inline]
pub fn creal<T: Real>(re: T) -> C<T> {
    Complex::new(re, T::zero())
}

#[inline]
pub fn imag_unit<T: Real>() -> C<T> {
    Complex::new(T::zero(), T::one())
}

/// `|z|`; `Complex::norm` needs `Float`, which `RealField` does not imply.
#[inline]
pub fn cabs<T: Real>(z: C<T>) -> T {
    z.re.hypot(z.im)
}
