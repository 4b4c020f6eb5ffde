//! Order-zero Bessel and Hankel functions.
//!
//! Below `x = 25` the Steed evaluator is used; above it the Hankel
//! large-argument expansion converges to full precision in a handful of
//! terms. The same expansion, with complex argument, serves the rotated
//! contours in the resolvent kernel.

use crate::error::{Error, Result};
use crate::scalar::{cplx, Cplx, Real};
use crate::special::bessel::bessel_jy_scaled;

/// Switch-over point between the Steed evaluator and the asymptotic series.
pub const ASYMPTOTIC_SWITCH: f64 = 25.0;

/// Smallest `|z|` accepted by [`hankel1_0_complex`].
pub const COMPLEX_MIN_MODULUS: f64 = 20.0;

/// Sums `P(z) + i Q(z)` of the order-zero Hankel expansion,
/// `Σ_k a_k(0) (i/z)^k` with `a_k(0) = (-1)^k (1·3·…·(2k-1))² / (k! 8^k)`.
fn hankel_pq<T: Real>(z: Cplx<T>) -> Cplx<T> {
    let iz = cplx(T::zero(), T::one()) / z;
    let mut term = cplx(T::one(), T::zero());
    let mut sum = term;
    let mut prev = T::infinity();
    let eps = T::epsilon() * T::lit(0.25);
    for k in 1..60 {
        let m = T::lit((2 * k - 1) as f64);
        term = term * iz * (-m * m / T::lit(8.0 * k as f64));
        let size = term.norm();
        if size >= prev {
            break;
        }
        sum += term;
        prev = size;
        if size < eps {
            break;
        }
    }
    sum
}

/// `(J_0(x), Y_0(x))` from the large-argument expansion.
fn j0y0_asymptotic<T: Real>(x: T) -> (T, T) {
    let pq = hankel_pq(cplx(x, T::zero()));
    let (s, c) = x.sin_cos();
    let inv_sqrt2 = T::FRAC_1_SQRT_2();
    // cos(x - π/4), sin(x - π/4) without forming x - π/4.
    let cchi = (c + s) * inv_sqrt2;
    let schi = (s - c) * inv_sqrt2;
    let amp = (T::lit(2.0) / (T::PI() * x)).sqrt();
    (
        amp * (pq.re * cchi - pq.im * schi),
        amp * (pq.re * schi + pq.im * cchi),
    )
}

/// `(J_0(x), Y_0(x))` for `x > 0`.
pub fn j0_y0<T: Real>(x: T) -> Result<(T, T)> {
    if !(x > T::zero()) || !x.is_finite() {
        return Err(Error::domain("j0_y0", format!("x = {} must be positive", x)));
    }
    if x > T::lit(ASYMPTOTIC_SWITCH) {
        Ok(j0y0_asymptotic(x))
    } else {
        let s = bessel_jy_scaled(T::zero(), x)?;
        Ok((s.j_value(), s.y_value()))
    }
}

/// `J_0(x)` for `x >= 0`.
pub fn j0<T: Real>(x: T) -> Result<T> {
    if x == T::zero() {
        return Ok(T::one());
    }
    Ok(j0_y0(x)?.0)
}

/// `H_0^{(1)}(x) = J_0(x) + i Y_0(x)` for `x > 0`.
pub fn hankel1_0<T: Real>(x: T) -> Result<Cplx<T>> {
    let (j, y) = j0_y0(x)?;
    Ok(cplx(j, y))
}

/// `H_0^{(1)}(z)` for complex `z` with `|z| >= 20` and `-π/2 < arg z < π`,
/// from the asymptotic expansion.
pub fn hankel1_0_complex<T: Real>(z: Cplx<T>) -> Result<Cplx<T>> {
    if !(z.norm() >= T::lit(COMPLEX_MIN_MODULUS)) {
        return Err(Error::domain(
            "hankel1_0_complex",
            format!("|z| = {} below the asymptotic threshold", z.norm()),
        ));
    }
    let arg = z.arg();
    if !(arg > -T::FRAC_PI_2() && arg < T::PI()) {
        return Err(Error::domain(
            "hankel1_0_complex",
            format!("arg z = {} outside (-π/2, π)", arg),
        ));
    }
    let pq = hankel_pq(z);
    let amp = (cplx(T::lit(2.0) / T::PI(), T::zero()) / z).sqrt();
    let phase = (cplx(T::zero(), T::one()) * z).exp()
        * cplx(T::FRAC_1_SQRT_2(), -T::FRAC_1_SQRT_2());
    Ok(amp * phase * pq)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_sides_of_the_switch_agree() {
        for &x in &[20.0_f64, 23.3, 24.999, 25.0, 25.001, 27.5, 30.0] {
            let (ja, ya) = j0y0_asymptotic(x);
            let s = bessel_jy_scaled(0.0, x).unwrap();
            assert!((ja - s.j_value()).abs() < 2e-15, "x={x}");
            assert!((ya - s.y_value()).abs() < 2e-15, "x={x}");
        }
    }

    // mpmath references.
    #[test]
    fn reference_values() {
        let (j, y) = j0_y0(100.0_f64).unwrap();
        assert!((j - 0.019_985_850_304_223_122).abs() < 1e-16);
        assert!((y + 0.077_244_313_365_083_15).abs() < 1e-16);
        let h = hankel1_0_complex(cplx(30.0_f64, 10.0)).unwrap();
        assert!((h.re - -4.592_991_747_731_097e-6).abs() < 1e-18);
        assert!((h.im - -4.504_588_585_119_445e-6).abs() < 1e-18);
        let h = hankel1_0_complex(cplx(21.0_f64, -2.0)).unwrap();
        assert!((h.re - 0.209_905_763_386_943_45).abs() < 1e-14);
        assert!((h.im - 1.266_898_507_425_452_6).abs() < 1e-14);
    }

    #[test]
    fn complex_reduces_to_real() {
        let h = hankel1_0_complex(cplx(40.0_f64, 0.0)).unwrap();
        let r = hankel1_0(40.0_f64).unwrap();
        assert!((h - r).norm() < 1e-16);
        assert!(hankel1_0_complex(cplx(5.0_f64, 1.0)).is_err());
        assert!(hankel1_0_complex(cplx(-30.0_f64, -1.0)).is_err());
    }
}
