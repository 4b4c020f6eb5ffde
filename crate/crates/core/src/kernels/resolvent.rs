use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    angle_difference, branches_for, d_diff_complex, ConeAngle, ConePoint, DiffractionDensity,
};
use crate::kernels::contour::{diffractive_integral, Path, Weight};
use crate::kernels::KernelValue;
use crate::quadrature::{Estimate, QuadratureConfig};
use crate::scalar::{cplx, Cplx, Real};
use crate::special::hankel::{hankel1_0, hankel1_0_complex, j0};

/// Side of the spectrum the resolvent `(Δ − (λ² ± i0))^{-1}` is taken from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    /// `+i0`, outgoing, built from `H_0^{(1)}`.
    Outgoing,
    /// `−i0`, incoming, built from `H_0^{(2)}`.
    Incoming,
}

/// Argument `λ|d_s|` above which complex Hankel values come from the
/// asymptotic series; the real leg of the contour ends there.
const ROTATION_START: f64 = 25.0;

/// `H_0^{(1)}(λ d_s)`.
struct HankelWeight<T> {
    lambda: T,
    r1: T,
    r2: T,
}

impl<T: Real> HankelWeight<T> {
    fn arg(&self, s: Cplx<T>) -> Cplx<T> {
        d_diff_complex(s, self.r1, self.r2) * self.lambda
    }
}

impl<T: Real> Weight<T> for HankelWeight<T> {
    fn value(&self, s: Cplx<T>) -> Cplx<T> {
        let z = self.arg(s);
        let h = if s.im == T::zero() {
            hankel1_0(z.re)
        } else {
            hankel1_0_complex(z)
        };
        h.unwrap_or(cplx(T::nan(), T::nan()))
    }

    fn bound(&self, s: Cplx<T>) -> T {
        let z = self.arg(s);
        if s.im == T::zero() {
            // |H_0^{(1)}| decreases along the positive axis.
            return hankel1_0(z.re).map(|h| h.norm()).unwrap_or(T::infinity());
        }
        let m = z.norm();
        (T::lit(2.0) / (T::PI() * m)).sqrt() * (-z.im).exp() * (T::one() + (T::lit(4.0) * m).recip())
    }

    fn phase_rate(&self, s: Cplx<T>) -> T {
        let d = d_diff_complex(s, self.r1, self.r2);
        self.lambda * self.r1 * self.r2 * s.sinh().norm() / d.norm()
    }
}

/// `∫_0^∞ H_0^{(1)}(λ d_s) A_σ(s) ds` along the upper contour.
fn hankel_integral<T: Real>(
    lambda: T,
    r1: T,
    r2: T,
    dens: &DiffractionDensity<T>,
    abs_tol: T,
    cfg: &QuadratureConfig<T>,
) -> Result<Estimate<Cplx<T>, T>> {
    let target = T::lit(ROTATION_START) / lambda;
    let c = (target * target - r1 * r1 - r2 * r2) / (T::lit(2.0) * r1 * r2);
    let real_end = if c > T::one() { c.acosh() } else { T::zero() };
    let weight = HankelWeight { lambda, r1, r2 };
    diffractive_integral(
        dens,
        &weight,
        Path {
            real_end,
            turn: T::one(),
        },
        abs_tol,
        cfg,
    )
}

fn check_lambda<T: Real>(what: &'static str, lambda: T) -> Result<()> {
    if lambda > T::zero() && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(what, format!("lambda = {} must be positive", lambda)))
    }
}

/// Kernel of `(Δ − (λ² ± i0))^{-1}` for distinct points.
///
/// Outgoing: `geometric = (i/4) Σ_j w_j H_0^{(1)}(λ d_j)`,
/// `diffractive = −(i/(4πσ)) ∫_0^∞ H_0^{(1)}(λ d_s) A_σ(s) ds`; the incoming
/// kernel is the complex conjugate.
pub fn resolvent_kernel<T: Real>(
    lambda: T,
    sign: Sign,
    p1: &ConePoint<T>,
    p2: &ConePoint<T>,
    cone: ConeAngle<T>,
    cfg: &QuadratureConfig<T>,
) -> Result<KernelValue<T>> {
    cfg.validate()?;
    check_lambda("resolvent_kernel", lambda)?;
    let dtheta = angle_difference(p1, p2);
    let branches = branches_for(dtheta, p1.r, p2.r, cone);
    if p1 == p2 || branches.iter().any(|b| b.distance == T::zero()) {
        return Err(Error::domain("resolvent_kernel", "points must be distinct"));
    }
    let mut sum = cplx(T::zero(), T::zero());
    for b in &branches {
        sum += hankel1_0(lambda * b.distance)? * b.weight;
    }
    let geometric = sum * cplx(T::zero(), T::lit(0.25));

    let dens = DiffractionDensity::new(dtheta, cone);
    let pref_abs = (T::lit(4.0) * T::PI() * cone.sigma()).recip();
    let est = hankel_integral(lambda, p1.r, p2.r, &dens, cfg.abs_tol / pref_abs, cfg)?;
    let diffractive = est.value * cplx(T::zero(), -pref_abs);
    let out = KernelValue::new(geometric, diffractive, pref_abs * est.error);
    Ok(match sign {
        Sign::Outgoing => out,
        Sign::Incoming => out.conj(),
    })
}

/// Density of the spectral measure of `√Δ` at `λ`, a real number returned
/// in the real parts of the [`KernelValue`]:
/// `(λ/2π) Σ_j w_j J_0(λ d_j) − (λ/(2π²σ)) ∫_0^∞ J_0(λ d_s) A_σ(s) ds`.
pub fn spectral_measure_density<T: Real>(
    lambda: T,
    p1: &ConePoint<T>,
    p2: &ConePoint<T>,
    cone: ConeAngle<T>,
    cfg: &QuadratureConfig<T>,
) -> Result<KernelValue<T>> {
    cfg.validate()?;
    check_lambda("spectral_measure_density", lambda)?;
    let pi = T::PI();
    let dtheta = angle_difference(p1, p2);
    let mut sum = T::zero();
    for b in branches_for(dtheta, p1.r, p2.r, cone) {
        sum += j0(lambda * b.distance)? * b.weight;
    }
    let geometric = lambda / (T::lit(2.0) * pi) * sum;

    let dens = DiffractionDensity::new(dtheta, cone);
    let pref = lambda / (T::lit(2.0) * pi * pi * cone.sigma());
    let est = hankel_integral(lambda, p1.r, p2.r, &dens, cfg.abs_tol / pref, cfg)?;
    let diffractive = -pref * est.value.re;
    Ok(KernelValue::new(
        cplx(geometric, T::zero()),
        cplx(diffractive, T::zero()),
        pref * est.error,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn setup(sigma: f64, a: (f64, f64), b: (f64, f64)) -> (ConeAngle<f64>, ConePoint<f64>, ConePoint<f64>) {
        let c = ConeAngle::new(sigma).unwrap();
        (c, ConePoint::new(a.0, a.1, c).unwrap(), ConePoint::new(b.0, b.1, c).unwrap())
    }

    #[test]
    fn free_resolvent_and_density() {
        let (c, p, q) = setup(1.0, (1.0, 0.0), (2.0, 1.0));
        let cfg = QuadratureConfig::default();
        let d = (5.0 - 4.0 * 1f64.cos()).sqrt();
        let r = resolvent_kernel(1.3, Sign::Outgoing, &p, &q, c, &cfg).unwrap();
        let exact = hankel1_0(1.3 * d).unwrap() * cplx(0.0, 0.25);
        assert!((r.total - exact).norm() < 1e-14);
        let s = spectral_measure_density(1.3, &p, &q, c, &cfg).unwrap();
        assert!((s.total.re - 1.3 * j0(1.3 * d).unwrap() / (2.0 * PI)).abs() < 1e-15);
        assert!(resolvent_kernel(1.0, Sign::Outgoing, &p, &p, c, &cfg).is_err());
    }

    #[test]
    fn stone_formula() {
        let (c, p, q) = setup(2.3, (1.0, 0.2), (1.7, 4.0));
        let cfg = QuadratureConfig::default();
        for &lambda in &[0.05, 0.9, 3.0, 30.0] {
            let r = resolvent_kernel(lambda, Sign::Outgoing, &p, &q, c, &cfg).unwrap();
            let s = spectral_measure_density(lambda, &p, &q, c, &cfg).unwrap();
            let stone = 2.0 * lambda / PI * r.total.im;
            assert!((stone - s.total.re).abs() <= 1e-9 * s.total.re.abs().max(1e-3), "{lambda}");
            let m = resolvent_kernel(lambda, Sign::Incoming, &p, &q, c, &cfg).unwrap();
            assert_eq!(m.total, r.total.conj());
        }
    }
}
