//! Angular mode sums: the kernels rebuilt from separation of variables,
//! `Σ_k φ_k(θ₁) conj(φ_k(θ₂)) K_{ν_k}(r₁, r₂)` with `φ_k(θ) = (2πσ)^{-1/2} e^{−ikθ/σ}`
//! and `ν_k = |k|/σ`. Used as ground truth for the closed forms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{angle_difference, ConeAngle, ConePoint};
use crate::kernels::Sign;
use crate::scalar::{cplx, Cplx, Real};
use crate::special::bessel::bessel_jy_scaled;
use crate::special::gamma::ln_gamma;
use crate::special::{modified_i, BesselOrder};

/// Truncation controls shared by all mode sums.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeSumConfig<T> {
    /// Requested bound on the neglected tail.
    pub tail_tol: T,
    /// Hard ceiling on `|k|`.
    pub k_max: usize,
}

impl<T: Real> Default for ModeSumConfig<T> {
    fn default() -> Self {
        Self {
            tail_tol: T::lit(1e-9),
            k_max: 400,
        }
    }
}

/// Truncated mode sum with its tail certificate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModeSum<T> {
    pub value: Cplx<T>,
    /// Bound (or, for the resolvent, a geometric-decay estimate) on the
    /// neglected modes.
    pub tail_bound: T,
    /// Largest `|k|` included.
    pub k_used: usize,
}

/// Regularization parameters `ε₀, ε₀/2, ε₀/4` and their extrapolation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Extrapolated<T> {
    /// Quadratic Richardson limit `ε → 0`.
    pub value: Cplx<T>,
    /// `|quadratic − linear|` extrapolation discrepancy.
    pub extrapolation_error: T,
    /// Raw sums at `ε₀, ε₀/2, ε₀/4`.
    pub raw: [Cplx<T>; 3],
    pub eps: [T; 3],
    /// Largest tail bound among the three sums.
    pub tail_bound: T,
    pub k_used: usize,
}

/// Per-mode Schrödinger kernel from Weber's second exponential integral:
/// `∫_0^∞ e^{−pρ²} J_ν(r₁ρ) J_ν(r₂ρ) ρ dρ = e^{−(r₁²+r₂²)/(4p)} / (2p) · I_ν(r₁r₂/(2p))`
/// with `p = ε + it`.
pub fn weber_mode_kernel<T: Real>(
    order: BesselOrder<T>,
    t: T,
    r1: T,
    r2: T,
    eps: T,
) -> Result<Cplx<T>> {
    if t == T::zero() || !(eps > T::zero()) {
        return Err(Error::domain("weber_mode_kernel", "need t != 0 and eps > 0"));
    }
    let p = cplx(eps, t);
    let two = T::lit(2.0);
    let z = cplx(r1 * r2 / two, T::zero()) / p;
    let gauss = (-cplx(r1 * r1 + r2 * r2, T::zero()) / (p * T::lit(4.0))).exp() / (p * two);
    Ok(gauss * modified_i(order, z)?)
}

/// `ln` of `|z/2|^ν e^{|Re z|} / Γ(ν+1)`, which bounds `|I_ν(z)|`.
fn ln_i_bound<T: Real>(nu: T, z: Cplx<T>) -> T {
    let h = (z.norm() * T::lit(0.5)).ln();
    let lead = if nu == T::zero() { T::zero() } else { nu * h };
    lead + z.re.abs() - ln_gamma(nu + T::one())
}

/// Shared truncation loop: adds modes `k = 1, 2, …` until the certified tail
/// falls below `cfg.tail_tol`. `term(k)` returns the pair contribution of
/// `±k` and `ln_bound(k)` the log of a bound on its modulus, which must
/// eventually decrease geometrically or faster.
fn truncated_sum<T, F, B>(
    cfg: &ModeSumConfig<T>,
    zero: Cplx<T>,
    mut term: F,
    ln_bound: B,
) -> Result<ModeSum<T>>
where
    T: Real,
    F: FnMut(usize) -> Result<Cplx<T>>,
    B: Fn(usize) -> T,
{
    let mut sum = zero;
    let mut last_tail = T::infinity();
    for k in 1..=cfg.k_max {
        sum += term(k)?;
        let b1 = ln_bound(k + 1);
        let b2 = ln_bound(k + 2);
        let ratio = (b2 - b1).exp();
        if ratio < T::one() {
            let tail = b1.exp() / (T::one() - ratio);
            last_tail = tail;
            // Require the bound to be in its decaying regime as well.
            if tail <= cfg.tail_tol && ln_bound(k + 3) - b2 <= b2 - b1 {
                return Ok(ModeSum {
                    value: sum,
                    tail_bound: tail,
                    k_used: k,
                });
            }
        }
    }
    Err(Error::TruncationInsufficient {
        k_max: cfg.k_max,
        bound: last_tail.as_f64(),
        requested: cfg.tail_tol.as_f64(),
    })
}

/// Schrödinger mode sum at fixed regularization `ε`:
/// `(2πσ)^{-1} Σ_k e^{−ikΔθ/σ} K_{|k|/σ}(t − iε)`.
pub fn mode_sum_schrodinger_eps<T: Real>(
    t: T,
    p1: &ConePoint<T>,
    p2: &ConePoint<T>,
    cone: ConeAngle<T>,
    eps: T,
    cfg: &ModeSumConfig<T>,
) -> Result<ModeSum<T>> {
    let sigma = cone.sigma();
    let dtheta = angle_difference(p1, p2);
    let norm = (T::lit(2.0) * T::PI() * sigma).recip();
    let (r1, r2) = (p1.r, p2.r);
    let p = cplx(eps, t);
    let z = cplx(r1 * r2 / T::lit(2.0), T::zero()) / p;
    let gauss = (-cplx(r1 * r1 + r2 * r2, T::zero()) / (p * T::lit(4.0))).exp() / (p * T::lit(2.0));
    let ln_pref = (gauss.norm() * norm * T::lit(2.0)).ln();
    let k0 = weber_mode_kernel(BesselOrder::for_mode(0, sigma), t, r1, r2, eps)? * norm;
    let mut out = truncated_sum(
        cfg,
        k0,
        |k| {
            let order = BesselOrder::for_mode(k as i64, sigma);
            let c = (T::from_usize_lossy(k) * dtheta / sigma).cos() * T::lit(2.0);
            Ok(weber_mode_kernel(order, t, r1, r2, eps)? * (norm * c))
        },
        |k| ln_pref + ln_i_bound(T::from_usize_lossy(k) / sigma, z),
    )?;
    out.tail_bound = out.tail_bound.max(T::zero());
    Ok(out)
}

/// Default regularization `ε₀` for time `t` and radii `r₁, r₂`: small
/// against both `|t|` and the phase scale `4t²/(r₁+r₂)²`.
pub fn default_eps<T: Real>(t: T, r1: T, r2: T) -> T {
    let rs = r1 + r2;
    let phase = rs * rs / (T::lit(4.0) * t.abs());
    T::lit(1e-3) * t.abs() * T::one().min(phase.recip())
}

/// Schrödinger mode sum extrapolated to `ε → 0` from `ε₀ {1, 1/2, 1/4}`.
pub fn mode_sum_schrodinger<T: Real>(
    t: T,
    p1: &ConePoint<T>,
    p2: &ConePoint<T>,
    cone: ConeAngle<T>,
    eps0: Option<T>,
    cfg: &ModeSumConfig<T>,
) -> Result<Extrapolated<T>> {
    let e0 = eps0.unwrap_or_else(|| default_eps(t, p1.r, p2.r));
    let eps = [e0, e0 * T::lit(0.5), e0 * T::lit(0.25)];
    let mut raw = [cplx(T::zero(), T::zero()); 3];
    let mut tail = T::zero();
    let mut k_used = 0;
    for (i, &e) in eps.iter().enumerate() {
        let s = mode_sum_schrodinger_eps(t, p1, p2, cone, e, cfg)?;
        raw[i] = s.value;
        tail = tail.max(s.tail_bound);
        k_used = k_used.max(s.k_used);
    }
    let (value, err) = richardson(&raw);
    Ok(Extrapolated {
        value,
        extrapolation_error: err,
        raw,
        eps,
        tail_bound: tail,
        k_used,
    })
}

/// Richardson extrapolation of samples at `ε, ε/2, ε/4` assuming
/// `f(ε) = f(0) + aε + bε² + …`; returns the quadratic limit and its
/// distance from the linear one.
pub fn richardson<T: Real>(f: &[Cplx<T>; 3]) -> (Cplx<T>, T) {
    let quad = (f[2] * T::lit(8.0) - f[1] * T::lit(6.0) + f[0]) / T::lit(3.0);
    let lin = f[2] * T::lit(2.0) - f[1];
    (quad, (quad - lin).norm())
}

/// Spectral-measure mode sum
/// `(λ/(2πσ)) Σ_k e^{−ikΔθ/σ} J_{|k|/σ}(λr₁) J_{|k|/σ}(λr₂)`, summed over
/// `k = −K..K` in complex arithmetic so that the imaginary residual can be
/// inspected.
pub fn mode_sum_spectral<T: Real>(
    lambda: T,
    p1: &ConePoint<T>,
    p2: &ConePoint<T>,
    cone: ConeAngle<T>,
    cfg: &ModeSumConfig<T>,
) -> Result<ModeSum<T>> {
    if !(lambda > T::zero()) {
        return Err(Error::domain("mode_sum_spectral", "lambda must be positive"));
    }
    let sigma = cone.sigma();
    let dtheta = angle_difference(p1, p2);
    let pref = lambda / (T::lit(2.0) * T::PI() * sigma);
    let (a, b) = (lambda * p1.r, lambda * p2.r);
    let jj = |nu: T| -> Result<T> {
        let ja = bessel_jy_scaled(nu, a)?;
        let jb = bessel_jy_scaled(nu, b)?;
        Ok(ja.j * jb.j * (ja.log_j + jb.log_j).exp())
    };
    let ln_half = (a * b * T::lit(0.25)).ln();
    truncated_sum(
        cfg,
        cplx(pref * jj(T::zero())?, T::zero()),
        |k| {
            let nu = T::from_usize_lossy(k) / sigma;
            let v = jj(nu)? * pref;
            let ang = T::from_usize_lossy(k) * dtheta / sigma;
            // e^{−ik·} + e^{+ik·}, each term added separately
            Ok(cplx(ang.cos(), -ang.sin()) * v + cplx(ang.cos(), ang.sin()) * v)
        },
        |k| {
            let nu = T::from_usize_lossy(k) / sigma;
            (T::lit(2.0) * pref).ln() + nu * ln_half - T::lit(2.0) * ln_gamma(nu + T::one())
        },
    )
}

/// Resolvent mode sum
/// `(2πσ)^{-1} Σ_k e^{−ikΔθ/σ} (iπ/2) J_ν(λr_<) H_ν^{(1)}(λr_>)` (outgoing;
/// incoming is the conjugate). Requires `r₁ ≠ r₂`; the tail certificate is a
/// geometric extrapolation of the last terms, valid once `ν ≫ λr_>`.
pub fn mode_sum_resolvent<T: Real>(
    lambda: T,
    sign: Sign,
    p1: &ConePoint<T>,
    p2: &ConePoint<T>,
    cone: ConeAngle<T>,
    cfg: &ModeSumConfig<T>,
) -> Result<ModeSum<T>> {
    if !(lambda > T::zero()) {
        return Err(Error::domain("mode_sum_resolvent", "lambda must be positive"));
    }
    if p1.r == p2.r {
        return Err(Error::domain(
            "mode_sum_resolvent",
            "equal radii: the mode sum does not converge absolutely",
        ));
    }
    let sigma = cone.sigma();
    let dtheta = angle_difference(p1, p2);
    let norm = (T::lit(2.0) * T::PI() * sigma).recip();
    let (rl, rg) = if p1.r < p2.r { (p1.r, p2.r) } else { (p2.r, p1.r) };
    let (a, b) = (lambda * rl, lambda * rg);
    let half_pi = T::FRAC_PI_2();
    let mode = |nu: T| -> Result<Cplx<T>> {
        let ja = bessel_jy_scaled(nu, a)?;
        let hb = bessel_jy_scaled(nu, b)?;
        let jj = ja.j * hb.j * (ja.log_j + hb.log_j).exp();
        let jy = ja.j * hb.y * (ja.log_j + hb.log_y).exp();
        // (iπ/2) J_ν(a) (J_ν(b) + i Y_ν(b))
        Ok(cplx(-half_pi * jy, half_pi * jj) * norm)
    };
    let ln_ratio = (rl / rg).ln();
    let mut last = T::zero();
    let mut tail = T::infinity();
    let mut sum = mode(T::zero())?;
    for k in 1..=cfg.k_max {
        let nu = T::from_usize_lossy(k) / sigma;
        let m = mode(nu)?;
        let ang = T::from_usize_lossy(k) * dtheta / sigma;
        sum += m * (ang.cos() * T::lit(2.0));
        let size = m.norm() * T::lit(2.0);
        // For ν ≫ b, |J_ν(a) Y_ν(b)| ≈ (a/b)^ν / (πν) decreases by
        // (r_</r_>)^{1/σ} per mode.
        let rho = (ln_ratio / sigma).exp();
        if nu > T::lit(2.0) * b + T::lit(5.0) && size <= last {
            tail = size * rho / (T::one() - rho);
            if tail <= cfg.tail_tol {
                let value = match sign {
                    Sign::Outgoing => sum,
                    Sign::Incoming => sum.conj(),
                };
                return Ok(ModeSum {
                    value,
                    tail_bound: tail,
                    k_used: k,
                });
            }
        }
        last = size;
    }
    Err(Error::TruncationInsufficient {
        k_max: cfg.k_max,
        bound: tail.as_f64(),
        requested: cfg.tail_tol.as_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate, QuadratureConfig};
    use crate::special::hankel::hankel1_0;
    use std::f64::consts::PI;

    fn setup(sigma: f64, a: (f64, f64), b: (f64, f64)) -> (ConeAngle<f64>, ConePoint<f64>, ConePoint<f64>) {
        let c = ConeAngle::new(sigma).unwrap();
        (c, ConePoint::new(a.0, a.1, c).unwrap(), ConePoint::new(b.0, b.1, c).unwrap())
    }

    #[test]
    fn weber_matches_direct_quadrature() {
        let (nu, t, r1, r2, eps) = (1.5_f64, 0.7, 0.8, 1.3, 0.5);
        let w = weber_mode_kernel(BesselOrder::new(nu).unwrap(), t, r1, r2, eps).unwrap();
        let upper = (1e-10f64.ln() / -eps).sqrt();
        let cfg = QuadratureConfig::with_tol(1e-12);
        let bps: Vec<f64> = (0..=40).map(|i| upper * i as f64 / 40.0).collect();
        let direct = integrate(
            "weber",
            |rho: f64| {
                let j1 = bessel_jy_scaled(nu, (r1 * rho).max(1e-300)).unwrap().j_value();
                let j2 = bessel_jy_scaled(nu, (r2 * rho).max(1e-300)).unwrap().j_value();
                cplx(-eps * rho * rho, -t * rho * rho).exp() * (j1 * j2 * rho)
            },
            &bps,
            &cfg,
        )
        .unwrap();
        assert!((w - direct.value).norm() < 1e-9, "{w} vs {}", direct.value);
        let back = weber_mode_kernel(BesselOrder::new(nu).unwrap(), -t, r1, r2, eps).unwrap();
        assert!((back - w.conj()).norm() < 1e-15);
        let small = weber_mode_kernel(BesselOrder::new(0.0).unwrap(), t, 1e-160, 1e-160, eps).unwrap();
        let p = cplx(eps, t);
        assert!((small - (p * 2.0).inv()).norm() < 1e-14);
    }

    #[test]
    fn flat_schrodinger_oracle() {
        let (c, p, q) = setup(1.0, (1.0, 0.3), (0.7, 1.4));
        let t = 0.6;
        let o = mode_sum_schrodinger(t, &p, &q, c, None, &ModeSumConfig::default()).unwrap();
        let d2 = 1.0 + 0.49 - 1.4 * (1.1f64).cos();
        let exact = cplx(0.0, d2 / (4.0 * t)).exp() / cplx(0.0, 4.0 * PI * t);
        assert!((o.value - exact).norm() < 1e-8, "{} vs {exact}", o.value);
        assert!(o.extrapolation_error < 1e-7, "{}", o.extrapolation_error);
    }

    #[test]
    fn extrapolation_error_bounds_the_actual_error() {
        for &(t, a, b) in &[(0.6, (1.0, 0.3), (0.7, 1.4)), (-1.7, (2.0, 0.0), (0.4, 2.5)), (0.25, (0.5, 1.0), (0.9, 0.2))] {
            let (c, p, q) = setup(1.0, a, b);
            let o = mode_sum_schrodinger(t, &p, &q, c, None, &ModeSumConfig::default()).unwrap();
            let d2 = p.r * p.r + q.r * q.r - 2.0 * p.r * q.r * (p.theta - q.theta).cos();
            let exact = cplx(0.0, d2 / (4.0 * t)).exp() / cplx(0.0, 4.0 * PI * t);
            let err = (o.value - exact).norm();
            assert!(err <= 10.0 * o.extrapolation_error + 1e-12, "{} vs {}", err, o.extrapolation_error);
        }
    }

    #[test]
    fn neumann_identity() {
        let (c, p, _) = setup(1.0, (1.0, 0.0), (1.0, 0.0));
        let s = mode_sum_spectral(1.0, &p, &p, c, &ModeSumConfig::default()).unwrap();
        assert!((s.value.re - 1.0 / (2.0 * PI)).abs() <= s.tail_bound, "{} {}", s.value, s.tail_bound);
        assert!(s.value.im.abs() < 1e-12);
    }

    #[test]
    fn flat_resolvent_oracle() {
        let (c, p, q) = setup(1.0, (1.0, 0.3), (0.7, 1.4));
        let lambda = 1.7;
        let o = mode_sum_resolvent(lambda, Sign::Outgoing, &p, &q, c, &ModeSumConfig::default()).unwrap();
        let d = (1.49 - 1.4 * 1.1f64.cos()).sqrt();
        let exact = hankel1_0(lambda * d).unwrap() * cplx(0.0, 0.25);
        assert!((o.value - exact).norm() < 1e-9 * exact.norm(), "{} vs {exact}", o.value);
        let m = mode_sum_resolvent(lambda, Sign::Incoming, &p, &q, c, &ModeSumConfig::default()).unwrap();
        assert_eq!(m.value, o.value.conj());
    }

    #[test]
    fn truncation_ceiling_reported() {
        let (c, p, q) = setup(3.0, (30.0, 0.0), (31.0, 1.0));
        let cfg = ModeSumConfig { tail_tol: 1e-9, k_max: 20 };
        assert!(matches!(
            mode_sum_spectral(2.0, &p, &q, c, &cfg),
            Err(Error::TruncationInsufficient { .. })
        ));
    }
}
