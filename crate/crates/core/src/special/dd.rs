//! Double-double ("compensated") arithmetic: each value is an unevaluated sum
//! `hi + lo` with `|lo| <= ulp(hi) / 2`, built on error-free transformations.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::scalar::{Cplx, Real};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DoubleDouble<T> {
    pub hi: T,
    pub lo: T,
}

#[inline]
fn two_sum<T: Real>(a: T, b: T) -> (T, T) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum<T: Real>(a: T, b: T) -> (T, T) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod<T: Real>(a: T, b: T) -> (T, T) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl<T: Real> DoubleDouble<T> {
    pub fn new(x: T) -> Self {
        Self { hi: x, lo: T::zero() }
    }

    pub fn zero() -> Self {
        Self::new(T::zero())
    }

    pub fn to_real(self) -> T {
        self.hi + self.lo
    }

    pub fn abs(self) -> Self {
        if self.hi < T::zero() {
            -self
        } else {
            self
        }
    }

    pub fn mul_real(self, b: T) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        Self { hi, lo }
    }
}

impl<T: Real> Neg for DoubleDouble<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self { hi: -self.hi, lo: -self.lo }
    }
}

impl<T: Real> Add for DoubleDouble<T> {
    type Output = Self;
    fn add(self, b: Self) -> Self {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Self { hi, lo }
    }
}

impl<T: Real> Sub for DoubleDouble<T> {
    type Output = Self;
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl<T: Real> Mul for DoubleDouble<T> {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Self { hi, lo }
    }
}

impl<T: Real> Div for DoubleDouble<T> {
    type Output = Self;
    fn div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_real(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_real(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Self { hi, lo } + Self::new(q3)
    }
}

/// Complex number with double-double components.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexDd<T> {
    pub re: DoubleDouble<T>,
    pub im: DoubleDouble<T>,
}

impl<T: Real> ComplexDd<T> {
    pub fn from_cplx(z: Cplx<T>) -> Self {
        Self {
            re: DoubleDouble::new(z.re),
            im: DoubleDouble::new(z.im),
        }
    }

    pub fn one() -> Self {
        Self {
            re: DoubleDouble::new(T::one()),
            im: DoubleDouble::zero(),
        }
    }

    pub fn to_cplx(self) -> Cplx<T> {
        Cplx::new(self.re.to_real(), self.im.to_real())
    }

    /// Magnitude estimate from the leading parts only.
    pub fn norm_hi(self) -> T {
        self.re.hi.hypot(self.im.hi)
    }

    pub fn div_dd(self, d: DoubleDouble<T>) -> Self {
        Self {
            re: self.re / d,
            im: self.im / d,
        }
    }
}

impl<T: Real> Add for ComplexDd<T> {
    type Output = Self;
    fn add(self, b: Self) -> Self {
        Self {
            re: self.re + b.re,
            im: self.im + b.im,
        }
    }
}

impl<T: Real> Mul for ComplexDd<T> {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        Self {
            re: self.re * b.re - self.im * b.im,
            im: self.re * b.im + self.im * b.re,
        }
    }
}
