//! Splitting of the circle average `2π J_0(r)` into outgoing and incoming
//! amplitudes `a_±(r)` with `a_+ e^{ir} + a_- e^{-ir} = 2π J_0(r)`.

use crate::error::{Error, Result};
use crate::scalar::{cplx, Cplx, Real};
use crate::special::hankel::{hankel1_0, j0};

/// Smooth step: 0 for `r <= 1/2`, 1 for `r >= 1`, C^∞ in between.
pub fn blend<T: Real>(r: T) -> T {
    let half = T::lit(0.5);
    if r <= half {
        return T::zero();
    }
    if r >= T::one() {
        return T::one();
    }
    let u = T::lit(2.0) * r - T::one();
    let a = (-u.recip()).exp();
    let b = (-(T::one() - u).recip()).exp();
    a / (a + b)
}

/// `(a_+(r), a_-(r))` for `r >= 0`.
///
/// `a_+(r) = π e^{-ir} [β(r) H_0^{(1)}(r) + (1 - β(r)) J_0(r)]` and
/// `a_- = conj(a_+)`. The Hankel part only enters once `r > 1/2`, away from
/// its logarithmic singularity, and gives the `(1+r)^{-1/2}` decay.
pub fn circle_amplitudes<T: Real>(r: T) -> Result<(Cplx<T>, Cplx<T>)> {
    if !(r >= T::zero()) || !r.is_finite() {
        return Err(Error::domain("circle_amplitudes", format!("r = {} must be >= 0", r)));
    }
    let beta = blend(r);
    let inner = if beta == T::zero() {
        cplx(j0(r)?, T::zero())
    } else {
        let h = hankel1_0(r)?;
        h * beta + cplx((T::one() - beta) * h.re, T::zero())
    };
    let (s, c) = r.sin_cos();
    let a_plus = cplx(c, -s) * inner * T::PI();
    Ok((a_plus, a_plus.conj()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn origin_and_identity() {
        let (ap, am) = circle_amplitudes(0.0_f64).unwrap();
        assert_eq!(ap, cplx(PI, 0.0));
        assert_eq!(am, cplx(PI, 0.0));
        for i in 0..400 {
            let r = 0.05 * i as f64;
            let (ap, am) = circle_amplitudes(r).unwrap();
            let (s, c) = r.sin_cos();
            let lhs = ap * cplx(c, s) + am * cplx(c, -s);
            assert!((lhs - cplx(2.0 * PI * j0(r).unwrap(), 0.0)).norm() < 1e-10, "r={r}");
        }
    }

    #[test]
    fn hankel_decay() {
        let (ap, _) = circle_amplitudes(10.0_f64).unwrap();
        assert!(ap.norm() <= PI * (2.0 / (10.0 * PI)).sqrt() * 1.01);
        assert!(circle_amplitudes(-1.0_f64).is_err());
    }

    #[test]
    fn blend_is_a_monotone_step() {
        let mut prev = 0.0;
        for i in 0..=100 {
            let b = blend(0.4 + 0.007 * i as f64);
            assert!((0.0..=1.0).contains(&b) && b >= prev);
            prev = b;
        }
        assert_eq!(blend(0.5_f64), 0.0);
        assert_eq!(blend(1.0_f64), 1.0);
    }
}
