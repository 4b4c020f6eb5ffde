//! Cone parameterization, geometric branches, the two distance functions and
//! the diffraction density `A_σ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_real, Estimate, QuadratureConfig};
use crate::scalar::{cplx, Cplx, Real};

/// Absolute tolerance for detecting `|Δθ + 2jσπ| = π` and removable
/// singularities of `A_σ`.
pub const ENDPOINT_TOL: f64 = 1e-12;

/// Radius `σ` of the cross-section `S¹_σ = ℝ / 2πσℤ`; total cone angle `2πσ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ConeAngle<T>(T);

impl<T: Real> ConeAngle<T> {
    pub fn new(sigma: T) -> Result<Self> {
        if sigma > T::zero() && sigma.is_finite() {
            Ok(Self(sigma))
        } else {
            Err(Error::domain("ConeAngle", format!("sigma = {} must be positive", sigma)))
        }
    }

    pub fn sigma(self) -> T {
        self.0
    }

    /// Angular period `2πσ`.
    pub fn period(self) -> T {
        T::lit(2.0) * T::PI() * self.0
    }

    /// Reduces `theta` into `[0, 2πσ)`; the flag reports whether it moved.
    pub fn normalize_angle(self, theta: T) -> (T, bool) {
        let p = self.period();
        if theta >= T::zero() && theta < p {
            return (theta, false);
        }
        let mut t = theta - p * (theta / p).floor();
        if t >= p || t < T::zero() {
            t = T::zero();
        }
        (t, true)
    }
}

/// Point `(r, θ)` on the cone with `r > 0` and `θ ∈ [0, 2πσ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConePoint<T> {
    pub r: T,
    pub theta: T,
}

impl<T: Real> ConePoint<T> {
    /// Builds a point, reducing `theta` modulo `2πσ`.
    pub fn new(r: T, theta: T, cone: ConeAngle<T>) -> Result<Self> {
        if !(r > T::zero()) || !r.is_finite() {
            return Err(Error::domain("ConePoint", format!("r = {} must be positive", r)));
        }
        if !theta.is_finite() {
            return Err(Error::domain("ConePoint", "theta must be finite"));
        }
        let (theta, _) = cone.normalize_angle(theta);
        Ok(Self { r, theta })
    }
}

/// `Δθ = θ₁ − θ₂` for points already normalized on the same cone; lies in
/// `(−2πσ, 2πσ)`.
pub fn angle_difference<T: Real>(p1: &ConePoint<T>, p2: &ConePoint<T>) -> T {
    p1.theta - p2.theta
}

/// One term of the geometric sum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GeometricBranch<T> {
    pub j: i64,
    /// 1, or 1/2 when `|Δθ + 2jσπ| = π`.
    pub weight: T,
    pub distance: T,
}

fn branch_distance<T: Real>(psi: T, r1: T, r2: T) -> T {
    let s = (T::lit(0.5) * psi).sin();
    let dr = r1 - r2;
    (dr * dr + T::lit(4.0) * r1 * r2 * s * s).sqrt()
}

/// All `j` with `|Δθ + 2jσπ| ≤ π`. May be empty when `σ > 1`.
pub fn geometric_branches<T: Real>(
    p1: &ConePoint<T>,
    p2: &ConePoint<T>,
    cone: ConeAngle<T>,
) -> Vec<GeometricBranch<T>> {
    branches_for(angle_difference(p1, p2), p1.r, p2.r, cone)
}

pub(crate) fn branches_for<T: Real>(
    dtheta: T,
    r1: T,
    r2: T,
    cone: ConeAngle<T>,
) -> Vec<GeometricBranch<T>> {
    let pi = T::PI();
    let tol = T::lit(ENDPOINT_TOL);
    let p = cone.period();
    let lo = ((-pi - dtheta - tol) / p).ceil().to_i64().unwrap_or(0);
    let hi = ((pi - dtheta + tol) / p).floor().to_i64().unwrap_or(-1);
    (lo..=hi)
        .filter_map(|j| {
            let psi = dtheta + T::from_i64_lossy(j) * p;
            let gap = psi.abs() - pi;
            if gap > tol {
                return None;
            }
            let weight = if gap.abs() <= tol { T::lit(0.5) } else { T::one() };
            Some(GeometricBranch {
                j,
                weight,
                distance: branch_distance(psi, r1, r2),
            })
        })
        .collect()
}

/// `d_j = (r₁² + r₂² − 2 r₁ r₂ cos(Δθ + 2jσπ))^{1/2}` in cancellation-free form.
pub fn d_geo<T: Real>(j: i64, p1: &ConePoint<T>, p2: &ConePoint<T>, cone: ConeAngle<T>) -> T {
    let psi = angle_difference(p1, p2) + T::from_i64_lossy(j) * cone.period();
    branch_distance(psi, p1.r, p2.r)
}

/// `d_s = (r₁² + r₂² + 2 r₁ r₂ cosh s)^{1/2}`; `+∞` beyond `s = 700`.
pub fn d_diff<T: Real>(s: T, p1: &ConePoint<T>, p2: &ConePoint<T>) -> T {
    if s > T::lit(700.0) {
        return T::infinity();
    }
    let sh = (T::lit(0.5) * s).sinh();
    let sum = p1.r + p2.r;
    (sum * sum + T::lit(4.0) * p1.r * p2.r * sh * sh).sqrt()
}

/// `d_s` continued to complex `s` (principal square root).
pub(crate) fn d_diff_complex<T: Real>(s: Cplx<T>, r1: T, r2: T) -> Cplx<T> {
    let sh = (s * T::lit(0.5)).sinh();
    let sum = r1 + r2;
    (sh * sh * (T::lit(4.0) * r1 * r2) + cplx(sum * sum, T::zero())).sqrt()
}

/// `1 − e^{−w}` without cancellation for small `|w|`.
fn one_minus_exp_neg<T: Real>(w: Cplx<T>) -> Cplx<T> {
    if w.norm() < T::lit(0.1) {
        // Σ_{k≥1} (−1)^{k+1} w^k / k!
        let mut term = w;
        let mut sum = w;
        for k in 2..16 {
            term = -term * w / T::from_usize_lossy(k);
            sum += term;
        }
        sum
    } else {
        cplx(T::one(), T::zero()) - (-w).exp()
    }
}

/// The diffraction density `A_σ(s)` for a fixed angle difference.
///
/// Each of its two terms has the form `q sin φ / ((1 − q)² + 4 q sin²(φ/2))`
/// with `q = e^{−s/σ}` and `φ = (π ∓ Δθ)/σ` reduced to `[−π, π]`.
#[derive(Clone, Debug)]
pub struct DiffractionDensity<T> {
    sigma: T,
    /// `(φ, sin φ, sin²(φ/2))` of the nonvanishing terms.
    terms: Vec<(T, T, T)>,
}

impl<T: Real> DiffractionDensity<T> {
    pub fn new(dtheta: T, cone: ConeAngle<T>) -> Self {
        let sigma = cone.sigma();
        let p = cone.period();
        let tol = T::lit(ENDPOINT_TOL);
        let mut terms = Vec::with_capacity(2);
        for x in [T::PI() - dtheta, T::PI() + dtheta] {
            let rem = x - p * (x / p).round();
            if rem.abs() <= tol {
                continue;
            }
            let phi = rem / sigma;
            let h = (T::lit(0.5) * phi).sin();
            terms.push((phi, phi.sin(), h * h));
        }
        let mut out = Self { sigma, terms };
        // The two terms cancel exactly when σ = 1/m.
        if out.terms.len() == 2 && (out.terms[0].1 + out.terms[1].1).abs() <= tol
            && (out.terms[0].2 - out.terms[1].2).abs() <= tol
        {
            out.terms.clear();
        }
        out
    }

    /// True when `A_σ` vanishes identically for this angle difference.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    /// Reduced angles `φ` of the nonvanishing terms; `A_σ` peaks on the
    /// scale `σ|φ|` near `s = 0` when `φ` is small.
    pub fn angles(&self) -> impl Iterator<Item = T> + '_ {
        self.terms.iter().map(|t| t.0)
    }

    pub fn eval(&self, s: T) -> T {
        let w = s / self.sigma;
        let q = (-w).exp();
        let omq = -(-w).exp_m1();
        self.terms
            .iter()
            .map(|&(_, sphi, h2)| q * sphi / (omq * omq + T::lit(4.0) * q * h2))
            .sum()
    }

    pub fn eval_complex(&self, s: Cplx<T>) -> Cplx<T> {
        let w = s / self.sigma;
        let q = (-w).exp();
        let omq = one_minus_exp_neg(w);
        let mut acc = cplx(T::zero(), T::zero());
        for &(_, sphi, h2) in &self.terms {
            acc += q * sphi / (omq * omq + q * (T::lit(4.0) * h2));
        }
        acc
    }

    /// Bound on `|A_σ(s)|` valid for complex `s` with `Re s = u > 0`:
    /// `2|E| / (|E| − 1)²`, `|E| = e^{u/σ}`.
    pub fn envelope(&self, u: T) -> T {
        if self.is_zero() {
            return T::zero();
        }
        let q = (-u / self.sigma).exp();
        let omq = -(-u / self.sigma).exp_m1();
        T::lit(2.0) * q / (omq * omq)
    }

    /// `∫_u^∞` of [`Self::envelope`]: `2σ / (e^{u/σ} − 1)`.
    pub fn envelope_tail(&self, u: T) -> T {
        if self.is_zero() {
            return T::zero();
        }
        T::lit(2.0) * self.sigma / (u / self.sigma).exp_m1()
    }

    /// Smallest `u` with `envelope_tail(u) ≤ tol`.
    pub fn truncation_point(&self, tol: T) -> T {
        self.sigma * (T::one() + T::lit(2.0) * self.sigma / tol).ln()
    }

    /// Breakpoints resolving the Lorentzian peaks near `s = 0`.
    pub(crate) fn peak_breakpoints(&self, upper: T) -> Vec<T> {
        let mut pts = vec![T::zero()];
        for phi in self.angles() {
            let w = self.sigma * phi.abs();
            if w < T::one() {
                for f in [0.25, 1.0, 4.0, 16.0] {
                    let x = w * T::lit(f);
                    if x < upper {
                        pts.push(x);
                    }
                }
            }
        }
        let mut x = T::lit(0.5);
        while x < upper {
            pts.push(x);
            x = x * T::lit(2.0);
        }
        pts.push(upper);
        pts.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
        pts.dedup();
        pts
    }
}

/// `A_σ(s, θ₁, θ₂)` for real `s ≥ 0`.
pub fn a_sigma<T: Real>(s: T, theta1: T, theta2: T, cone: ConeAngle<T>) -> T {
    DiffractionDensity::new(theta1 - theta2, cone).eval(s)
}

/// `∫_0^∞ |A_σ(s, θ₁, θ₂)| ds` to absolute accuracy `tol`.
pub fn a_sigma_l1<T: Real>(
    theta1: T,
    theta2: T,
    cone: ConeAngle<T>,
    tol: T,
) -> Result<Estimate<T, T>> {
    if !(tol > T::zero()) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    let dens = DiffractionDensity::new(theta1 - theta2, cone);
    if dens.is_zero() {
        return Ok(Estimate {
            value: T::zero(),
            error: T::zero(),
            evaluations: 0,
        });
    }
    let half = T::lit(0.5);
    let upper = dens.truncation_point(half * tol);
    let bps = dens.peak_breakpoints(upper);
    let cfg = QuadratureConfig {
        abs_tol: half * tol,
        rel_tol: T::epsilon() * T::lit(100.0),
        max_subdivisions: 20_000,
        phase_resolution: T::FRAC_PI_4(),
    };
    let mut est = integrate_real("a_sigma_l1", |s| dens.eval(s).abs(), &bps, &cfg)?;
    est.error += dens.envelope_tail(upper);
    Ok(est)
}
