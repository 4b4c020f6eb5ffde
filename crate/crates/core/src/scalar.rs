//! Scalar abstraction shared by every numerical module.
//!
//! All kernels, special functions and quadrature rules are written against
//! [`Real`], so they can be instantiated for `f32` or `f64`. The accuracy
//! targets documented throughout the crate assume `f64`.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, RemAssign, SubAssign};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + Debug
    + Display
    + Default
    + Sum
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + RemAssign
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal, rounding to the nearest representable value.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("integer fits in float")
    }

    fn from_i64_lossy(n: i64) -> Self {
        Self::from_i64(n).expect("integer fits in float")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Euler–Mascheroni constant.
    fn euler_gamma() -> Self {
        Self::lit(0.577_215_664_901_532_860_6)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex value built on a [`Real`] scalar.
pub type Cplx<T> = Complex<T>;

pub(crate) fn cplx<T: Real>(re: T, im: T) -> Cplx<T> {
    Complex::new(re, im)
}

pub(crate) fn is_finite_c<T: Real>(z: Cplx<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}
