//! Diffractive `s`-integrals `∫_0^∞ W(s) A_σ(s) ds` along a rotated contour.
//!
//! The weights `W` used by the kernels (`e^{ic(cosh s − 1)}` and
//! `H_0^{(1)}(λ d_s)`) oscillate ever faster along the real axis but decay
//! super-exponentially in one half of the strip `0 < |Im s| < π/2`, where
//! `A_σ` has no poles. The path is
//!
//! ```text
//! [0, u₀]  →  u₀ + τ(1 ± i), 0 ≤ τ ≤ β  →  u + iβ·(±1), u ≥ u₀ + β
//! ```
//!
//! with `β = π/4`, truncated where the weight bound times the `A_σ` envelope
//! tail falls below tolerance.

use crate::error::Result;
use crate::geometry::DiffractionDensity;
use crate::quadrature::{integrate, phase_breakpoints, Estimate, QuadratureConfig};
use crate::scalar::{cplx, Cplx, Real};

/// Imaginary height of the rotated contour.
pub(crate) const BETA: f64 = std::f64::consts::FRAC_PI_4;

const MAX_PHASE_PANELS: usize = 20_000;
const MAX_HORIZONTAL: f64 = 700.0;

/// Weight function of a diffractive integral.
pub(crate) trait Weight<T: Real> {
    fn value(&self, s: Cplx<T>) -> Cplx<T>;
    /// Bound on `|W|` at `s` and everywhere further along the path.
    fn bound(&self, s: Cplx<T>) -> T;
    /// Local rate of change of the phase of `W` with respect to `s`.
    fn phase_rate(&self, s: Cplx<T>) -> T;
}

/// Where the path leaves the real axis and which way it turns.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Path<T> {
    pub real_end: T,
    /// `+1` turns into the upper half plane, `−1` into the lower.
    pub turn: T,
}

fn merge<T: Real>(mut a: Vec<T>, b: Vec<T>, lo: T, hi: T) -> Vec<T> {
    a.extend(b);
    a.retain(|x| *x >= lo && *x <= hi);
    a.push(lo);
    a.push(hi);
    a.sort_by(|x, y| x.partial_cmp(y).expect("finite breakpoints"));
    a.dedup_by(|x, y| (*x - *y).abs() <= T::epsilon() * hi.abs().max(T::one()));
    a
}

fn accumulate<T: Real>(total: &mut Estimate<Cplx<T>, T>, part: Estimate<Cplx<T>, T>) {
    total.value += part.value;
    total.error += part.error;
    total.evaluations += part.evaluations;
}

/// `∫_0^∞ W(s) A_σ(s) ds` to absolute accuracy `abs_tol` (split evenly over
/// the legs and the truncated tail).
pub(crate) fn diffractive_integral<T, W>(
    dens: &DiffractionDensity<T>,
    weight: &W,
    path: Path<T>,
    abs_tol: T,
    cfg: &QuadratureConfig<T>,
) -> Result<Estimate<Cplx<T>, T>>
where
    T: Real,
    W: Weight<T>,
{
    let mut total = Estimate {
        value: cplx(T::zero(), T::zero()),
        error: T::zero(),
        evaluations: 0,
    };
    if dens.is_zero() {
        return Ok(total);
    }
    let quarter = T::lit(0.25);
    let leg_cfg = QuadratureConfig {
        abs_tol: abs_tol * quarter,
        ..*cfg
    };
    let trunc_tol = abs_tol * quarter;
    let resolution = cfg.phase_resolution;

    // Real leg, possibly the whole path when the density dies out first.
    let w0 = weight.bound(cplx(T::zero(), T::zero()));
    let real_cut = dens.truncation_point(trunc_tol / w0.max(T::min_positive_value()));
    let real_end = path.real_end.min(real_cut);
    if real_end > T::zero() {
        let bps = merge(
            dens.peak_breakpoints(real_end),
            phase_breakpoints(
                T::zero(),
                real_end,
                |u| weight.phase_rate(cplx(u, T::zero())),
                resolution,
                MAX_PHASE_PANELS,
            ),
            T::zero(),
            real_end,
        );
        let part = integrate(
            "diffractive integral (real leg)",
            |u| {
                let s = cplx(u, T::zero());
                weight.value(s) * dens.eval(u)
            },
            &bps,
            &leg_cfg,
        )?;
        accumulate(&mut total, part);
    }
    if real_end >= real_cut {
        total.error += w0 * dens.envelope_tail(real_end);
        return Ok(total);
    }

    // Diagonal leg s = u₀ + τ(1 + i·turn), cut short once the weight has
    // decayed: the rest of the path then contributes at most
    // bound · (1 + √2) · envelope_tail(Re s).
    let beta = T::lit(BETA);
    let u0 = real_end;
    let dir = cplx(T::one(), path.turn);
    let sqrt2 = T::SQRT_2();
    let diag_tail = |tau: T| {
        weight.bound(dir * tau + u0) * (T::one() + sqrt2) * dens.envelope_tail(u0 + tau)
    };
    let mut diag_end = beta;
    if diag_tail(beta) <= trunc_tol {
        let (mut lo, mut hi) = (T::zero(), beta);
        for _ in 0..40 {
            let mid = T::lit(0.5) * (lo + hi);
            if diag_tail(mid) > trunc_tol {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        diag_end = hi;
    }
    let diag_bps = merge(
        if u0 == T::zero() {
            dens.peak_breakpoints(diag_end)
        } else {
            Vec::new()
        },
        phase_breakpoints(
            T::zero(),
            diag_end,
            |tau| sqrt2 * weight.phase_rate(dir * tau + u0),
            resolution,
            MAX_PHASE_PANELS,
        ),
        T::zero(),
        diag_end,
    );
    let part = integrate(
        "diffractive integral (diagonal leg)",
        |tau| {
            let s = dir * tau + u0;
            weight.value(s) * dens.eval_complex(s) * dir
        },
        &diag_bps,
        &leg_cfg,
    )?;
    accumulate(&mut total, part);
    if diag_end < beta {
        total.error += diag_tail(diag_end);
        return Ok(total);
    }

    // Horizontal leg s = u + iβ·turn, truncated by the envelope.
    let start = u0 + beta;
    let cap = T::lit(MAX_HORIZONTAL);
    let shift = cplx(T::zero(), beta * path.turn);
    let tail_at = |u: T| weight.bound(shift + u) * dens.envelope_tail(u);
    let mut step = T::lit(0.125);
    let mut end = start + step;
    while tail_at(end) > trunc_tol && end < cap {
        step = (step * T::lit(1.5)).min(T::lit(4.0));
        end += step;
    }
    // Back off to the smallest sufficient endpoint on the last step.
    let (mut lo, mut hi) = (end - step, end);
    for _ in 0..30 {
        let mid = T::lit(0.5) * (lo + hi);
        if tail_at(mid) > trunc_tol {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let end = hi.max(start + T::lit(1e-3));
    let mut ladder = Vec::new();
    let mut x = start + T::lit(0.5);
    while x < end {
        ladder.push(x);
        x = start + (x - start) * T::lit(2.0);
    }
    let horiz_bps = merge(
        ladder,
        phase_breakpoints(
            start,
            end,
            |u| weight.phase_rate(shift + u),
            resolution,
            MAX_PHASE_PANELS,
        ),
        start,
        end,
    );
    let part = integrate(
        "diffractive integral (horizontal leg)",
        |u| {
            let s = shift + u;
            weight.value(s) * dens.eval_complex(s)
        },
        &horiz_bps,
        &leg_cfg,
    )?;
    accumulate(&mut total, part);
    total.error += tail_at(end);
    Ok(total)
}
