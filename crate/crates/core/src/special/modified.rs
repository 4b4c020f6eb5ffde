//! Modified Bessel function `I_nu(z)` of real order and complex argument.
//!
//! Small and moderate `|z|` use the ascending series summed in complex
//! double-double arithmetic, which absorbs the cancellation that appears for
//! nearly imaginary `z`. Large `|z|` use the integral representation
//!
//! ```text
//! I_nu(z) = (1/π) ∫_0^π e^{z cos s} cos(nu s) ds
//!         - (sin(nu π)/π) ∫_0^∞ e^{-z cosh s - nu s} ds,
//! ```
//!
//! with the second integral taken along `s = -iτ (0 ≤ τ ≤ arg z)` followed by
//! `s = u - i arg z`, where the integrand decays without oscillating.

use crate::error::{Error, Result};
use crate::quadrature::{integrate, phase_breakpoints, QuadratureConfig};
use crate::scalar::{cplx, is_finite_c, Cplx, Real};
use crate::special::dd::{ComplexDd, DoubleDouble};
use crate::special::gamma::ln_gamma;
use crate::special::BesselOrder;

/// Largest `|z|` handled by the ascending series (unless `nu >= |z|`).
pub const SERIES_LIMIT: f64 = 30.0;

/// Lower edge of the band on which both methods are run and compared.
pub const OVERLAP_START: f64 = 20.0;

/// Relative agreement demanded between the two methods on the overlap band.
pub const DUAL_METHOD_TOL: f64 = 1e-8;

/// Value with a relative accuracy estimate.
#[derive(Clone, Copy, Debug)]
pub struct ModifiedI<T> {
    pub value: Cplx<T>,
    pub rel_error: T,
}

fn check_argument<T: Real>(z: Cplx<T>) -> Result<()> {
    if !is_finite_c(z) || !(z.re > T::zero()) {
        return Err(Error::domain(
            "modified_i",
            format!("argument {} must have positive real part", z),
        ));
    }
    Ok(())
}

/// `I_nu(z)` for `Re z > 0`.
///
/// On `20 <= |z| <= 30` (with `nu <= |z|`) both evaluation methods run and
/// an [`Error::AccuracyLoss`] is returned if they disagree beyond `1e-8`.
pub fn modified_i<T: Real>(order: BesselOrder<T>, z: Cplx<T>) -> Result<Cplx<T>> {
    check_argument(z)?;
    let nu = order.value();
    let m = z.norm();
    if m <= T::lit(SERIES_LIMIT) || nu >= m {
        let s = modified_i_series(nu, z)?;
        if m >= T::lit(OVERLAP_START) && nu <= m {
            let q = modified_i_integral(nu, z)?;
            let scale = s.value.norm().max(q.value.norm());
            let diff = (s.value - q.value).norm();
            if diff > T::lit(DUAL_METHOD_TOL) * scale {
                return Err(Error::AccuracyLoss {
                    what: "modified_i dual-method check",
                    estimate: (diff / scale).as_f64(),
                });
            }
        }
        return Ok(s.value);
    }
    Ok(modified_i_integral(nu, z)?.value)
}

/// Ascending series `(z/2)^nu / Γ(nu+1) · Σ_j w^j / (j! (nu+1)_j)`, `w = z²/4`.
pub fn modified_i_series<T: Real>(nu: T, z: Cplx<T>) -> Result<ModifiedI<T>> {
    if !(nu >= T::zero()) {
        return Err(Error::domain("modified_i_series", format!("order {} < 0", nu)));
    }
    if z == cplx(T::zero(), T::zero()) {
        let v = if nu == T::zero() { T::one() } else { T::zero() };
        return Ok(ModifiedI {
            value: cplx(v, T::zero()),
            rel_error: T::zero(),
        });
    }
    let half = cplx(T::lit(0.5), T::zero());
    let zh = ComplexDd::from_cplx(z * half);
    let w = zh * zh;
    let w_norm = w.norm_hi();
    let nu_dd = DoubleDouble::new(nu);
    let mut term = ComplexDd::one();
    let mut sum = term;
    let mut peak = T::one();
    let tiny = T::lit(1e-33);
    let mut converged = false;
    for j in 1..2000usize {
        let fj = T::from_usize_lossy(j);
        let fj_dd = DoubleDouble::new(fj);
        term = (term * w).div_dd(fj_dd * (nu_dd + fj_dd));
        sum = sum + term;
        let tn = term.norm_hi();
        peak = peak.max(tn);
        if fj * (nu + fj) > w_norm && tn <= tiny * sum.norm_hi() {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::AccuracyLoss {
            what: "modified_i ascending series",
            estimate: 1.0,
        });
    }
    let s = sum.to_cplx();
    // Each partial sum carries a rounding error near 1e-32 of its size.
    let cond = peak / sum.norm_hi();
    let rel_error = (T::lit(1e-31) * cond).max(T::epsilon());
    if rel_error > T::lit(1e-12) {
        return Err(Error::AccuracyLoss {
            what: "modified_i ascending series",
            estimate: rel_error.as_f64(),
        });
    }
    let log_pref = (z * half).ln() * nu - cplx(ln_gamma(nu + T::one()), T::zero());
    let value = log_pref.exp() * s;
    Ok(ModifiedI {
        value,
        rel_error: rel_error + T::lit(8.0) * T::epsilon() * (T::one() + log_pref.norm()),
    })
}

/// Integral representation of `I_nu(z)`, `Re z > 0`, by adaptive quadrature.
pub fn modified_i_integral<T: Real>(nu: T, z: Cplx<T>) -> Result<ModifiedI<T>> {
    check_argument(z)?;
    if !(nu >= T::zero()) {
        return Err(Error::domain("modified_i_integral", format!("order {} < 0", nu)));
    }
    let m = z.norm();
    // The Kronrod error floor is set by the integrand size, up to e^{Re z}.
    let cfg = QuadratureConfig {
        abs_tol: T::lit(1e-13) * z.re.exp().max(T::one()),
        rel_tol: T::lit(1e-13),
        max_subdivisions: 4000,
        phase_resolution: T::FRAC_PI_4(),
    };
    let pi = T::PI();

    let rate = z.im.abs() + nu;
    let bp = phase_breakpoints(T::zero(), pi, |_| rate, cfg.phase_resolution, 2000);
    let first = integrate(
        "modified_i cosine integral",
        |s| (z * s.cos()).exp() * (nu * s).cos(),
        &bp,
        &cfg,
    )?;
    let mut value = first.value / pi;
    let mut error = first.error / pi;

    let sin_nu_pi = (nu * pi).sin();
    if sin_nu_pi.abs() > T::epsilon() {
        let alpha = z.arg();
        let i = cplx(T::zero(), T::one());
        // Vertical leg s = -i α v, v ∈ [0, 1].
        let vrate = alpha.abs() * (m + nu);
        let vbp = phase_breakpoints(T::zero(), T::one(), |_| vrate, cfg.phase_resolution, 2000);
        let vert = integrate(
            "modified_i vertical leg",
            |v| {
                let a = alpha * v;
                (-z * a.cos() + i * (nu * a)).exp() * cplx(T::zero(), -alpha)
            },
            &vbp,
            &cfg,
        )?;
        // Horizontal leg s = u - i α.
        let (ca, sa) = (alpha.cos(), alpha.sin());
        let decay = |u: T| m * (ca * ca * u.cosh() + sa * sa * u.sinh()) + nu * u;
        let mut upper = T::lit(0.25);
        while decay(upper) < T::lit(42.0) && upper < T::lit(60.0) {
            upper = upper + upper.min(T::lit(0.5));
        }
        let mut hbp = vec![T::zero()];
        let mut x = T::lit(0.125).min(upper);
        while x < upper {
            hbp.push(x);
            x = x * T::lit(2.0);
        }
        hbp.push(upper);
        let rot = cplx(T::zero(), -alpha);
        let horiz = integrate(
            "modified_i horizontal leg",
            |u| {
                let s = cplx(u, T::zero()) + rot;
                (-z * s.cosh() - s * nu).exp()
            },
            &hbp,
            &cfg,
        )?;
        let second = vert.value + horiz.value;
        value = value - second * (sin_nu_pi / pi);
        error += (vert.error + horiz.error) * sin_nu_pi.abs() / pi;
    }
    let rel_error = error / value.norm().max(T::min_positive_value());
    Ok(ModifiedI { value, rel_error })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ord(nu: f64) -> BesselOrder<f64> {
        BesselOrder::new(nu).unwrap()
    }

    #[test]
    fn small_argument_limit() {
        let v = modified_i(ord(0.0), cplx(1e-300, 0.0)).unwrap();
        assert!((v - cplx(1.0, 0.0)).norm() < 1e-15);
        assert!(modified_i(ord(0.0), cplx(0.0, 1.0)).is_err());
        assert!(modified_i(ord(0.0), cplx(-1.0, 0.0)).is_err());
    }

    #[test]
    fn half_integer_closed_form() {
        let v = modified_i(ord(0.5), cplx(1.0, 0.0)).unwrap();
        let exact = (2.0 / std::f64::consts::PI).sqrt() * 1f64.sinh();
        assert!((v.re - exact).abs() < 1e-15 && v.im.abs() < 1e-16);
        assert!((exact - 0.937_674_888_245_488).abs() < 1e-14);
    }

    #[test]
    fn series_matches_integral_off_the_band() {
        let z = cplx(3.0, 4.0);
        let s = modified_i_series(2.0, z).unwrap().value;
        let q = modified_i_integral(2.0, z).unwrap().value;
        assert!((s - q).norm() <= 1e-8 * s.norm(), "{s} vs {q}");
    }

    // mpmath references.
    #[test]
    fn reference_values() {
        let cases: &[(f64, (f64, f64), (f64, f64))] = &[
            (2.0, (3.0, 4.0), (-2.166_168_455_648_781_9, -1.938_361_182_795_178_9)),
            (0.7, (1e-3, 25.0), (-0.030_868_897_768_869_626, -0.060_904_304_817_740_012)),
            (13.5, (0.02, -45.0), (-0.085_677_385_311_838_91, -0.085_919_934_154_474_671)),
            (80.0, (0.5, 40.0), (6.702_541_321_489_750_9e-18, -7.912_800_140_703_641_7e-18)),
        ];
        for &(nu, (zr, zi), (er, ei)) in cases {
            let got = modified_i(ord(nu), cplx(zr, zi)).unwrap();
            let exp = cplx(er, ei);
            assert!((got - exp).norm() <= 1e-11 * exp.norm(), "nu={nu}: {got} vs {exp}");
        }
    }

    #[test]
    fn overlap_band_agreement() {
        for &nu in &[0.0, 0.5, 1.0 / 1.5, 3.0, 7.3, 18.0] {
            for &(re, im) in &[(20.0, 0.0), (0.01, 22.0), (5.0, -24.0), (15.0, 20.0), (1e-4, -29.9)] {
                let z = cplx(re, im);
                let s = modified_i_series(nu, z).unwrap().value;
                let q = modified_i_integral(nu, z).unwrap().value;
                assert!((s - q).norm() <= 1e-8 * s.norm(), "nu={nu} z={z}: {s} vs {q}");
            }
        }
    }
}
