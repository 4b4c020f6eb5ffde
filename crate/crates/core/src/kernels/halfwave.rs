use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{angle_difference, branches_for, ConeAngle, ConePoint};
use crate::kernels::{spectral_measure_density, KernelValue};
use crate::quadrature::{gauss_weights_for_nodes, kronrod_nodes, phase_breakpoints, QuadratureConfig};
use crate::scalar::{cplx, Cplx, Real};

/// Smooth bump supported on `[1/2, 2]` with values in `[0, 1]`:
/// `exp(1 − 1/(1 − u²))`, `u = (4x − 5)/3`.
pub fn bump<T: Real>(x: T) -> T {
    let u = (T::lit(4.0) * x - T::lit(5.0)) / T::lit(3.0);
    let g = T::one() - u * u;
    if g <= T::zero() {
        return T::zero();
    }
    (T::one() - g.recip()).exp()
}

/// Panel refinement limits for the `λ`-integral.
#[derive(Clone, Copy, Debug)]
pub struct HalfWaveConfig {
    /// Minimum number of panels on `[2^{k−1}, 2^{k+1}]`.
    pub min_panels: usize,
    /// Maximum number of refinement passes.
    pub max_passes: usize,
    /// Phase advance allowed per initial panel; a 21-point Kronrod rule
    /// resolves several radians of oscillation.
    pub panel_phase: f64,
}

impl Default for HalfWaveConfig {
    fn default() -> Self {
        Self {
            min_panels: 8,
            max_passes: 6,
            panel_phase: 3.0,
        }
    }
}

struct Sample<T> {
    weight_k: T,
    weight_g: T,
    x: T,
    geo: T,
    diff: T,
    err: T,
}

/// `I_k(t, x, y) = ∫ e^{itλ} φ(2^{−k}λ) dE(λ; x, y)` for a single `t`.
pub fn half_wave_localized<T: Real>(
    t: T,
    k: i32,
    p1: &ConePoint<T>,
    p2: &ConePoint<T>,
    cone: ConeAngle<T>,
    cfg: &QuadratureConfig<T>,
) -> Result<KernelValue<T>> {
    Ok(half_wave_batch(&[t], k, p1, p2, cone, cfg, HalfWaveConfig::default())?[0])
}

/// `I_k` at several times, sharing one set of spectral-density samples.
///
/// The `λ`-range `[2^{k−1}, 2^{k+1}]` is split so that the phase
/// `(max|t| + max d) λ` advances by at most `panel_phase` per panel; each
/// panel carries a 21-point Kronrod rule, and panels whose Gauss/Kronrod
/// discrepancy exceeds their share of the tolerance are bisected.
pub fn half_wave_batch<T: Real>(
    ts: &[T],
    k: i32,
    p1: &ConePoint<T>,
    p2: &ConePoint<T>,
    cone: ConeAngle<T>,
    cfg: &QuadratureConfig<T>,
    hw: HalfWaveConfig,
) -> Result<Vec<KernelValue<T>>> {
    cfg.validate()?;
    if ts.iter().any(|t| !t.is_finite()) {
        return Err(Error::domain("half_wave_localized", "t must be finite"));
    }
    if !(-60..=60).contains(&k) {
        return Err(Error::domain("half_wave_localized", format!("k = {} out of range", k)));
    }
    let scale = T::lit(2.0).powi(k);
    let lo = scale * T::lit(0.5);
    let hi = scale * T::lit(2.0);
    let tmax = ts.iter().fold(T::zero(), |m, t| m.max(t.abs()));
    let dmax = branches_for(angle_difference(p1, p2), p1.r, p2.r, cone)
        .iter()
        .fold(p1.r + p2.r, |m, b| m.max(b.distance));
    let rate = tmax + dmax;
    let mut bps = phase_breakpoints(lo, hi, |_| rate, T::lit(hw.panel_phase), 1_000_000);
    while bps.len() <= hw.min_panels {
        bps = bisect_all(&bps);
    }
    // Density tolerance: the λ-range has length 1.5·2^k.
    let dens_cfg = QuadratureConfig {
        abs_tol: cfg.abs_tol / (T::lit(1.5) * scale),
        ..*cfg
    };

    let mut done: Vec<(Vec<Sample<T>>, T, T)> = Vec::new();
    let mut pending: Vec<(T, T)> = bps.windows(2).map(|w| (w[0], w[1])).collect();
    let mut pass = 0;
    while !pending.is_empty() {
        let panels: Vec<(Vec<Sample<T>>, T, T)> = pending
            .par_iter()
            .map(|&(a, b)| sample_panel(a, b, scale, p1, p2, cone, &dens_cfg).map(|s| (s, a, b)))
            .collect::<Result<_>>()?;
        pending.clear();
        // Estimate each panel's worst-case error over all t.
        let totals = integrate_samples(ts, done.iter().chain(panels.iter()));
        let last = pass + 1 >= hw.max_passes;
        for (samples, a, b) in panels {
            let share = (b - a) / (hi - lo);
            let needs_split = !last
                && ts.iter().zip(&totals).any(|(&t, tot)| {
                    let target = cfg.abs_tol.max(cfg.rel_tol * tot.total.norm()) * share;
                    panel_error(&samples, t) > target
                });
            if needs_split {
                let m = T::lit(0.5) * (a + b);
                pending.push((a, m));
                pending.push((m, b));
            } else {
                done.push((samples, a, b));
            }
        }
        pass += 1;
    }
    done.sort_by(|x, y| x.1.partial_cmp(&y.1).expect("finite panel bounds"));
    Ok(integrate_samples(ts, done.iter()))
}

fn bisect_all<T: Real>(bps: &[T]) -> Vec<T> {
    let mut out = Vec::with_capacity(2 * bps.len());
    for w in bps.windows(2) {
        out.push(w[0]);
        out.push(T::lit(0.5) * (w[0] + w[1]));
    }
    out.push(*bps.last().expect("non-empty"));
    out
}

fn sample_panel<T: Real>(
    a: T,
    b: T,
    scale: T,
    p1: &ConePoint<T>,
    p2: &ConePoint<T>,
    cone: ConeAngle<T>,
    cfg: &QuadratureConfig<T>,
) -> Result<Vec<Sample<T>>> {
    let nodes = kronrod_nodes(&[a, b]);
    let gauss = gauss_weights_for_nodes(&[a, b]);
    nodes
        .iter()
        .zip(gauss)
        .map(|(&(x, wk), wg)| {
            let phi = bump(x / scale);
            let (geo, diff, err) = if phi == T::zero() {
                (T::zero(), T::zero(), T::zero())
            } else {
                let v = spectral_measure_density(x, p1, p2, cone, cfg)?;
                (v.geometric.re * phi, v.diffractive.re * phi, v.error * phi)
            };
            Ok(Sample {
                weight_k: wk,
                weight_g: wg,
                x,
                geo,
                diff,
                err,
            })
        })
        .collect()
}

fn panel_error<T: Real>(samples: &[Sample<T>], t: T) -> T {
    let mut d = cplx(T::zero(), T::zero());
    for s in samples {
        let e = cplx(T::zero(), t * s.x).exp();
        d += e * ((s.weight_k - s.weight_g) * (s.geo + s.diff));
    }
    d.norm()
}

fn integrate_samples<'a, T: Real + 'a>(
    ts: &[T],
    panels: impl Iterator<Item = &'a (Vec<Sample<T>>, T, T)> + Clone,
) -> Vec<KernelValue<T>> {
    ts.iter()
        .map(|&t| {
            let mut geo = cplx(T::zero(), T::zero());
            let mut diff = cplx(T::zero(), T::zero());
            let mut err = T::zero();
            for (samples, _, _) in panels.clone() {
                let mut pg = cplx(T::zero(), T::zero());
                let mut pd = cplx(T::zero(), T::zero());
                let mut gauss = cplx(T::zero(), T::zero());
                for s in samples {
                    let e: Cplx<T> = cplx(T::zero(), t * s.x).exp();
                    pg += e * (s.weight_k * s.geo);
                    pd += e * (s.weight_k * s.diff);
                    gauss += e * (s.weight_g * (s.geo + s.diff));
                    err += s.weight_k * s.err;
                }
                err += (pg + pd - gauss).norm();
                geo += pg;
                diff += pd;
            }
            KernelValue::new(geo, diff, err)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate;
    use std::f64::consts::PI;

    #[test]
    fn bump_shape() {
        assert_eq!(bump(0.5_f64), 0.0);
        assert_eq!(bump(2.0_f64), 0.0);
        assert_eq!(bump(1.25_f64), 1.0);
        assert!(bump(0.9_f64) > 0.0 && bump(0.9_f64) < 1.0);
    }

    #[test]
    fn flat_diagonal_matches_scalar_quadrature() {
        let c = ConeAngle::new(1.0).unwrap();
        let p = ConePoint::new(1.3, 0.5, c).unwrap();
        let cfg = QuadratureConfig::default();
        for &(t, k) in &[(0.3, 0), (-2.0, 2), (0.05, 4)] {
            let got = half_wave_localized(t, k, &p, &p, c, &cfg).unwrap();
            let s = 2f64.powi(k);
            let exact = integrate(
                "oracle",
                |l: f64| cplx(0.0, t * l).exp() * (bump(l / s) * l / (2.0 * PI)),
                &[0.5 * s, s, 2.0 * s],
                &cfg,
            )
            .unwrap();
            assert!((got.total - exact.value).norm() < 1e-8 * exact.value.norm().max(1.0), "t={t} k={k}");
        }
    }

    #[test]
    fn batch_matches_single() {
        let c = ConeAngle::new(1.5).unwrap();
        let p = ConePoint::new(1.0, 0.0, c).unwrap();
        let q = ConePoint::new(2.0, 4.0, c).unwrap();
        let cfg = QuadratureConfig::with_tol(1e-9);
        let ts = [-1.0_f64, 0.2, 3.0];
        let batch = half_wave_batch(&ts, 1, &p, &q, c, &cfg, HalfWaveConfig::default()).unwrap();
        for (t, b) in ts.iter().zip(&batch) {
            let single = half_wave_localized(*t, 1, &p, &q, c, &cfg).unwrap();
            assert!((single.total - b.total).norm() < 1e-7 * b.total.norm().max(1.0));
        }
        let neg = half_wave_localized(-0.2_f64, 1, &p, &q, c, &cfg).unwrap();
        assert!((neg.total - batch[1].total.conj()).norm() < 1e-9 * neg.total.norm().max(1.0));
    }
}
