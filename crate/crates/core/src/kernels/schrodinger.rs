use crate::error::{Error, Result};
use crate::geometry::{angle_difference, branches_for, ConeAngle, ConePoint, DiffractionDensity};
use crate::kernels::contour::{diffractive_integral, Path, Weight};
use crate::kernels::KernelValue;
use crate::quadrature::QuadratureConfig;
use crate::scalar::{cplx, Cplx, Real};

/// `e^{ic(cosh s − 1)}`; decays in the half plane `sign(c)·Im s > 0`.
struct GaussWeight<T> {
    c: T,
}

impl<T: Real> Weight<T> for GaussWeight<T> {
    fn value(&self, s: Cplx<T>) -> Cplx<T> {
        let sh = (s * T::lit(0.5)).sinh();
        (sh * sh * cplx(T::zero(), T::lit(2.0) * self.c)).exp()
    }

    fn bound(&self, s: Cplx<T>) -> T {
        let sh = (s * T::lit(0.5)).sinh();
        (-T::lit(2.0) * self.c * (sh * sh).im).exp().min(T::one())
    }

    fn phase_rate(&self, s: Cplx<T>) -> T {
        self.c.abs() * s.sinh().norm()
    }
}

/// Kernel of `e^{−itΔ}` between `p1` and `p2`.
///
/// `geometric = (4πit)^{-1} Σ_j w_j e^{i d_j²/(4t)}` and
/// `diffractive = −(4π²σ it)^{-1} ∫_0^∞ e^{i d_s²/(4t)} A_σ(s) ds`.
pub fn schrodinger_kernel<T: Real>(
    t: T,
    p1: &ConePoint<T>,
    p2: &ConePoint<T>,
    cone: ConeAngle<T>,
    cfg: &QuadratureConfig<T>,
) -> Result<KernelValue<T>> {
    cfg.validate()?;
    if t == T::zero() || !t.is_finite() {
        return Err(Error::domain("schrodinger_kernel", "t must be finite and nonzero"));
    }
    let pi = T::PI();
    let four_t = T::lit(4.0) * t;
    let dtheta = angle_difference(p1, p2);
    let sum: Cplx<T> = branches_for(dtheta, p1.r, p2.r, cone)
        .iter()
        .map(|b| cplx(T::zero(), b.distance * b.distance / four_t).exp() * b.weight)
        .fold(cplx(T::zero(), T::zero()), |a, b| a + b);
    // 1/(4πit) = −i/(4πt)
    let geometric = sum * cplx(T::zero(), -(pi * four_t).recip());

    let dens = DiffractionDensity::new(dtheta, cone);
    if dens.is_zero() {
        return Ok(KernelValue::new(geometric, cplx(T::zero(), T::zero()), T::zero()));
    }
    let sigma = cone.sigma();
    // −1/(4π²σ it) = i/(4π²σ t)
    let pref_abs = (T::lit(4.0) * pi * pi * sigma * t.abs()).recip();
    let pref = cplx(T::zero(), pref_abs * t.signum());
    let weight = GaussWeight {
        c: p1.r * p2.r / (T::lit(2.0) * t),
    };
    let path = Path {
        real_end: T::zero(),
        turn: t.signum(),
    };
    let est = diffractive_integral(&dens, &weight, path, cfg.abs_tol / pref_abs, cfg)?;
    let rsum = p1.r + p2.r;
    let phase = cplx(T::zero(), rsum * rsum / four_t).exp();
    Ok(KernelValue::new(
        geometric,
        pref * phase * est.value,
        pref_abs * est.error,
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
    fn euclidean_reduction() {
        let (c, p, q) = setup(1.0, (1.0, 0.4), (2.0, 2.1));
        let t = 0.37;
        let k = schrodinger_kernel(t, &p, &q, c, &QuadratureConfig::default()).unwrap();
        let d2 = 1.0 + 4.0 - 4.0 * (0.4f64 - 2.1).cos();
        let exact = cplx(0.0, d2 / (4.0 * t)).exp() / cplx(0.0, 4.0 * PI * t);
        assert!((k.total - exact).norm() < 1e-14 * exact.norm());
        assert_eq!(k.diffractive, cplx(0.0, 0.0));
    }

    #[test]
    fn time_reversal_conjugates() {
        let (c, p, q) = setup(1.7, (1.0, 0.3), (0.6, 3.0));
        let cfg = QuadratureConfig::default();
        let a = schrodinger_kernel(0.8, &p, &q, c, &cfg).unwrap();
        let b = schrodinger_kernel(-0.8, &p, &q, c, &cfg).unwrap();
        assert!((a.total - b.total.conj()).norm() < 1e-11);
        assert!(a.diffractive.norm() > 1e-3);
        assert!(schrodinger_kernel(0.0, &p, &q, c, &cfg).is_err());
    }
}
