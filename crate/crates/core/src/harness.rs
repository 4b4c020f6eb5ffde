//! Grid sweeps of the dispersive ratios
//!
//! ```text
//! Schrödinger   |t| · |K_S(t, x, y)|
//! half-wave     |I_k(t, x, y)| · (2^{−k} + |t|)^{1/2} / 2^{3k/2}
//! A_σ           ∫_0^∞ |A_σ(s, Δθ)| ds
//! ```
//!
//! A sweep can only falsify a bound, never prove it: a report is "verified"
//! when its empirical constants are finite and move by less than 5% when the
//! grid density is doubled. Grid points are evaluated in parallel and merged
//! in grid order, so the output does not depend on the thread count.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{a_sigma_l1, ConeAngle, ConePoint, DiffractionDensity};
use crate::kernels::{half_wave_batch, schrodinger_kernel, HalfWaveConfig, KernelValue};
use crate::quadrature::{integrate_real, QuadratureConfig};
use crate::scalar::Real;

/// Relative change of an empirical constant tolerated under grid doubling.
pub const STABILITY_TOL: f64 = 0.05;

/// Largest spread (max/min of per-`k` constants) accepted as `k`-uniform.
pub const K_UNIFORMITY: f64 = 2.0;

/// Unit of the angles in a [`PointPair`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AngleUnit {
    /// Fractions of the cone period `2πσ`, so that one pair serves every `σ`.
    #[default]
    Turns,
    Radians,
}

/// Pair of points given as radii and angles.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointPair<T> {
    pub r1: T,
    pub theta1: T,
    pub r2: T,
    pub theta2: T,
    #[serde(default)]
    pub unit: AngleUnit,
}

impl<T: Real> PointPair<T> {
    /// Angles in turns of the cone period.
    pub fn turns(r1: T, turn1: T, r2: T, turn2: T) -> Self {
        Self { r1, theta1: turn1, r2, theta2: turn2, unit: AngleUnit::Turns }
    }

    pub fn radians(r1: T, theta1: T, r2: T, theta2: T) -> Self {
        Self { r1, theta1, r2, theta2, unit: AngleUnit::Radians }
    }

    pub fn points(&self, cone: ConeAngle<T>) -> Result<(ConePoint<T>, ConePoint<T>)> {
        let scale = match self.unit {
            AngleUnit::Turns => cone.period(),
            AngleUnit::Radians => T::one(),
        };
        Ok((
            ConePoint::new(self.r1, self.theta1 * scale, cone)?,
            ConePoint::new(self.r2, self.theta2 * scale, cone)?,
        ))
    }
}

type Pair<T> = (ConePoint<T>, ConePoint<T>);

fn midpoint<T: Real>(a: &Pair<T>, b: &Pair<T>, cone: ConeAngle<T>) -> Result<Pair<T>> {
    let h = T::lit(0.5);
    let mid = |p: &ConePoint<T>, q: &ConePoint<T>| {
        ConePoint::new(h * (p.r + q.r), h * (p.theta + q.theta), cone)
    };
    Ok((mid(&a.0, &b.0)?, mid(&a.1, &b.1)?))
}

/// Parameters swept by [`sweep_schrodinger`] and [`sweep_half_wave`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid<T> {
    pub sigma_list: Vec<T>,
    pub t_list: Vec<T>,
    /// Dyadic frequency indices (half-wave sweeps only).
    #[serde(default)]
    pub k_list: Vec<i32>,
    pub point_pairs: Vec<PointPair<T>>,
    pub tol: T,
    /// Number of density doublings applied to `t_list` and `point_pairs`.
    #[serde(default)]
    pub refinement: u32,
}

impl<T: Real> SweepGrid<T> {
    /// Five cone angles, eight times, seven dyadic shells and twelve pairs
    /// covering near-diagonal, antipodal, near-tip, shadow-boundary and
    /// diffraction-only configurations.
    pub fn default_grid() -> Self {
        let l = T::lit;
        let pi = std::f64::consts::PI;
        let turns = |a: f64, b: f64, c: f64, d: f64| PointPair::turns(l(a), l(b), l(c), l(d));
        let point_pairs = vec![
            turns(1.0, 0.0, 1.0, 0.0),
            turns(1.0, 0.0, 1.05, 0.01),
            turns(0.5, 0.0, 2.0, 0.1),
            turns(1.0, 0.0, 1.0, 0.5),
            turns(0.2, 0.0, 4.0, 0.5),
            turns(2.0, 0.0, 3.0, 0.25),
            turns(0.5, 0.0, 0.5, 0.0),
            turns(4.0, 0.0, 4.0, 0.4),
            // Lit side of the shadow boundary Δθ = π, near the first
            // Fresnel maximum for |t| = 1.
            PointPair::radians(l(2.0), l(0.0), l(2.0), l(pi - 1.6)),
            turns(2.5, 0.0, 1.0, 0.45),
            turns(0.2, 0.0, 0.2, 0.5),
            turns(3.0, 0.9, 3.5, 0.05),
        ];
        Self {
            sigma_list: vec![l(0.5), l(1.0), l(1.5), l(2.0), l(std::f64::consts::E / 2.0)],
            t_list: [-5.0, -1.0, -0.2, -0.05, 0.05, 0.2, 1.0, 5.0].iter().map(|&t| l(t)).collect(),
            k_list: (0..=6).collect(),
            point_pairs,
            tol: l(1e-8),
            refinement: 0,
        }
    }

    pub fn validate(&self, kind: SweepKind) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidInput(format!("sweep grid: {}", m)));
        if self.sigma_list.is_empty() || self.point_pairs.is_empty() {
            return bad("sigma_list and point_pairs must be nonempty");
        }
        if kind != SweepKind::ASigma && self.t_list.is_empty() {
            return bad("t_list must be nonempty");
        }
        if kind == SweepKind::HalfWave && self.k_list.is_empty() {
            return bad("k_list must be nonempty");
        }
        if kind == SweepKind::Schrodinger && self.t_list.iter().any(|t| *t == T::zero()) {
            return bad("t = 0 is not allowed in a Schrödinger sweep");
        }
        if self.t_list.iter().any(|t| !t.is_finite()) {
            return bad("t values must be finite");
        }
        if !(self.tol > T::zero()) {
            return bad("tol must be positive");
        }
        if self.refinement > 4 {
            return bad("at most 4 refinement levels");
        }
        for &s in &self.sigma_list {
            let cone = ConeAngle::new(s)?;
            for pair in &self.point_pairs {
                pair.points(cone)?;
            }
        }
        Ok(())
    }

    /// The same grid with its density doubled once more.
    pub fn refined(&self) -> Self {
        Self {
            refinement: self.refinement + 1,
            ..self.clone()
        }
    }

    /// Times after refinement: each doubling inserts the geometric mean
    /// between neighbouring same-sign times.
    pub fn times(&self) -> Vec<T> {
        let mut ts = self.t_list.clone();
        ts.sort_by(|a, b| a.partial_cmp(b).expect("finite t"));
        for _ in 0..self.refinement {
            let mut out = Vec::with_capacity(2 * ts.len());
            for w in ts.windows(2) {
                out.push(w[0]);
                if w[0] * w[1] > T::zero() {
                    out.push(w[0].signum() * (w[0] * w[1]).sqrt());
                }
            }
            out.extend(ts.last());
            ts = out;
        }
        ts
    }

    /// Point pairs on `cone` after refinement: each doubling inserts the
    /// coordinate midpoint between neighbouring pairs.
    pub fn pairs(&self, cone: ConeAngle<T>) -> Result<Vec<Pair<T>>> {
        let mut ps = self
            .point_pairs
            .iter()
            .map(|p| p.points(cone))
            .collect::<Result<Vec<_>>>()?;
        for _ in 0..self.refinement {
            let mut out = Vec::with_capacity(2 * ps.len());
            for w in ps.windows(2) {
                out.push(w[0]);
                out.push(midpoint(&w[0], &w[1], cone)?);
            }
            out.extend(ps.last());
            ps = out;
        }
        Ok(ps)
    }

    fn quadrature(&self) -> QuadratureConfig<T> {
        QuadratureConfig::with_tol(self.tol)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepKind {
    Schrodinger,
    #[serde(rename = "halfwave")]
    HalfWave,
    #[serde(rename = "asigma")]
    ASigma,
}

/// One grid point. Angles are in radians; `k` is set for half-wave rows,
/// `t` holds the angle difference for `A_σ` rows, which carry no points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub sigma: f64,
    pub k: Option<i32>,
    pub t: f64,
    pub points: Option<[f64; 4]>,
    pub value: [f64; 2],
    pub ratio: f64,
    pub err_estimate: f64,
}

/// Grid point whose evaluation failed; its row carries a NaN ratio.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointFailure {
    pub row: usize,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KSup {
    pub k: i32,
    pub sup: f64,
}

/// Pointwise domination of a single `A_σ` term by the majorants of the
/// two-regime `L¹` estimate, in the variable `u = s/σ`:
///
/// * head, after `v = e^u − 1`: `|sin φ| / ((v + 1 − cos φ)² + sin² φ)` below
///   `|sin φ| / (v² + sin² φ)` on `[0, e − 1]`, whose integral over `[0, ∞)`
///   is `π/2`;
/// * tail: the term below `e^u / (e^u − 1)²` on `u ≥ 1`, integral `1/(e − 1)`,
///   and below the coarser `e^{−u/2}`.
///
/// Together: `∫_0^∞ |A_σ| ds ≤ σ (π/2 + 1/(e − 1))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MajorantCheck {
    pub samples: usize,
    pub violations: usize,
    /// Largest (term / majorant) over all samples.
    pub worst_ratio: f64,
    /// Largest head integral `∫_0^{e−1}` of the transformed term.
    pub head_integral_max: f64,
    pub l1_bound: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SigmaSummary {
    pub sigma: f64,
    pub sup: f64,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub per_k: Vec<KSup>,
    /// max/min of per-`k` constants (half-wave) or of nonzero `∫|A_σ|`
    /// values over angles.
    pub uniformity: Option<f64>,
    /// Sup on the doubled grid.
    pub refined_sup: Option<f64>,
    /// Largest change of a per-angle `∫|A_σ|` value under tolerance halving.
    pub tolerance_change: Option<f64>,
    pub majorant: Option<MajorantCheck>,
}

/// Result of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub kind: SweepKind,
    pub config: serde_json::Value,
    #[serde(skip)]
    pub rows: Vec<SweepRow>,
    pub failures: Vec<PointFailure>,
    /// Sup of the recorded finite ratios.
    pub empirical_constant: f64,
    pub per_sigma: Vec<SigmaSummary>,
    /// All per-σ constants moved by less than [`STABILITY_TOL`] under
    /// refinement; `None` when no refinement was run.
    pub stable: Option<bool>,
    pub k_uniform: Option<bool>,
    pub runtime_seconds: f64,
}

impl BoundReport {
    /// Finite constants, stable and uniform where checked, no failed points
    /// and every majorant check passed.
    pub fn verified(&self) -> bool {
        self.failures.is_empty()
            && self.empirical_constant.is_finite()
            && self.stable != Some(false)
            && self.k_uniform != Some(false)
            && self
                .per_sigma
                .iter()
                .all(|s| s.majorant.as_ref().is_none_or(|m| m.passed))
    }

    /// Writes one CSV row per grid point. The second column is `t`, `k` or
    /// `dtheta` according to the sweep; half-wave rows also carry `t`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let f = |x: f64| format!("{:e}", x);
        match self.kind {
            SweepKind::Schrodinger => w.write_record([
                "sigma", "t", "r1", "theta1", "r2", "theta2", "value_re", "value_im", "ratio",
                "err_estimate",
            ])?,
            SweepKind::HalfWave => w.write_record([
                "sigma", "k", "t", "r1", "theta1", "r2", "theta2", "value_re", "value_im",
                "ratio", "err_estimate",
            ])?,
            SweepKind::ASigma => w.write_record([
                "sigma", "dtheta", "value_re", "value_im", "ratio", "err_estimate",
            ])?,
        }
        for row in &self.rows {
            let mut rec = vec![f(row.sigma)];
            if let Some(k) = row.k {
                rec.push(k.to_string());
            }
            rec.push(f(row.t));
            if let Some(p) = row.points {
                rec.extend(p.iter().map(|&x| f(x)));
            }
            rec.extend([row.value[0], row.value[1], row.ratio, row.err_estimate].map(f));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Options shared by the sweeps.
#[derive(Clone, Copy, Debug)]
pub struct SweepOptions {
    /// Repeat the sweep on the doubled grid and report stability.
    pub refine: bool,
    pub half_wave: HalfWaveConfig,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            refine: true,
            half_wave: HalfWaveConfig::default(),
        }
    }
}

fn f64s<T: Real>(p1: &ConePoint<T>, p2: &ConePoint<T>) -> [f64; 4] {
    [p1.r.as_f64(), p1.theta.as_f64(), p2.r.as_f64(), p2.theta.as_f64()]
}

fn row_from<T: Real>(
    sigma: T,
    k: Option<i32>,
    t: T,
    points: Option<[f64; 4]>,
    v: std::result::Result<(KernelValue<T>, T), String>,
) -> (SweepRow, Option<String>) {
    let base = |value: [f64; 2], ratio: f64, err: f64| SweepRow {
        sigma: sigma.as_f64(),
        k,
        t: t.as_f64(),
        points,
        value,
        ratio,
        err_estimate: err,
    };
    match v {
        Ok((kv, norm)) => {
            let ratio = (kv.total.norm() * norm).as_f64();
            let row = base([kv.total.re.as_f64(), kv.total.im.as_f64()], ratio, (kv.error * norm).as_f64());
            if ratio.is_finite() {
                (row, None)
            } else {
                (row, Some("non-finite ratio".into()))
            }
        }
        Err(e) => (base([f64::NAN; 2], f64::NAN, f64::NAN), Some(e)),
    }
}

fn collect(results: Vec<(SweepRow, Option<String>)>) -> (Vec<SweepRow>, Vec<PointFailure>) {
    let mut rows = Vec::with_capacity(results.len());
    let mut failures = Vec::new();
    for (i, (row, fail)) in results.into_iter().enumerate() {
        if let Some(reason) = fail {
            failures.push(PointFailure { row: i, reason });
        }
        rows.push(row);
    }
    (rows, failures)
}

fn sup<'a>(rows: impl Iterator<Item = &'a SweepRow>) -> f64 {
    rows.map(|r| r.ratio).filter(|r| r.is_finite()).fold(0.0, f64::max)
}

fn sigma_sups(rows: &[SweepRow], sigmas: &[f64]) -> Vec<f64> {
    sigmas
        .iter()
        .map(|&s| sup(rows.iter().filter(|r| r.sigma == s)))
        .collect()
}

fn relative_change(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn echo<T: Serialize>(grid: &T) -> serde_json::Value {
    serde_json::to_value(grid).unwrap_or(serde_json::Value::Null)
}

fn schrodinger_rows<T: Real>(grid: &SweepGrid<T>) -> Result<Vec<(SweepRow, Option<String>)>> {
    let cfg = grid.quadrature();
    let ts = grid.times();
    let mut jobs = Vec::new();
    for &sigma in &grid.sigma_list {
        let cone = ConeAngle::new(sigma)?;
        for (p1, p2) in grid.pairs(cone)? {
            for &t in &ts {
                jobs.push((cone, p1, p2, t));
            }
        }
    }
    Ok(jobs
        .par_iter()
        .map(|&(cone, p1, p2, t)| {
            let v = schrodinger_kernel(t, &p1, &p2, cone, &cfg)
                .map(|kv| (kv, t.abs()))
                .map_err(|e| e.to_string());
            row_from(cone.sigma(), None, t, Some(f64s(&p1, &p2)), v)
        })
        .collect())
}

/// Records `|t|·|K_S(t, x, y)|` over the grid.
pub fn sweep_schrodinger<T: Real + Serialize>(
    grid: &SweepGrid<T>,
    opts: &SweepOptions,
) -> Result<BoundReport> {
    let start = Instant::now();
    grid.validate(SweepKind::Schrodinger)?;
    let (rows, failures) = collect(schrodinger_rows(grid)?);
    let sigmas: Vec<f64> = grid.sigma_list.iter().map(|s| s.as_f64()).collect();
    let sups = sigma_sups(&rows, &sigmas);
    let refined = if opts.refine {
        let (r, _) = collect(schrodinger_rows(&grid.refined())?);
        Some(sigma_sups(&r, &sigmas))
    } else {
        None
    };
    Ok(assemble(
        SweepKind::Schrodinger,
        echo(grid),
        rows,
        failures,
        &sigmas,
        &sups,
        refined,
        start,
    ))
}

#[allow(clippy::too_many_arguments)]
fn assemble(
    kind: SweepKind,
    config: serde_json::Value,
    rows: Vec<SweepRow>,
    failures: Vec<PointFailure>,
    sigmas: &[f64],
    sups: &[f64],
    refined: Option<Vec<f64>>,
    start: Instant,
) -> BoundReport {
    let stable = refined.as_ref().map(|r| {
        sups.iter()
            .zip(r)
            .all(|(a, b)| b.is_finite() && relative_change(*a, *b) < STABILITY_TOL)
    });
    let per_sigma = sigmas
        .iter()
        .enumerate()
        .map(|(i, &sigma)| SigmaSummary {
            sigma,
            sup: sups[i],
            per_k: Vec::new(),
            uniformity: None,
            refined_sup: refined.as_ref().map(|r| r[i]),
            tolerance_change: None,
            majorant: None,
        })
        .collect();
    BoundReport {
        kind,
        config,
        empirical_constant: sup(rows.iter()),
        rows,
        failures,
        per_sigma,
        stable,
        k_uniform: None,
        runtime_seconds: start.elapsed().as_secs_f64(),
    }
}

fn half_wave_rows<T: Real>(
    grid: &SweepGrid<T>,
    hw: HalfWaveConfig,
) -> Result<Vec<(SweepRow, Option<String>)>> {
    let cfg = grid.quadrature();
    let ts = grid.times();
    let mut jobs = Vec::new();
    for &sigma in &grid.sigma_list {
        let cone = ConeAngle::new(sigma)?;
        for (p1, p2) in grid.pairs(cone)? {
            for &k in &grid.k_list {
                jobs.push((cone, p1, p2, k));
            }
        }
    }
    let two = T::lit(2.0);
    let blocks: Vec<Vec<(SweepRow, Option<String>)>> = jobs
        .par_iter()
        .map(|&(cone, p1, p2, k)| {
            let pts = Some(f64s(&p1, &p2));
            let batch = half_wave_batch(&ts, k, &p1, &p2, cone, &cfg, hw)
                .map_err(|e| e.to_string());
            ts.iter()
                .enumerate()
                .map(|(i, &t)| {
                    let norm = (two.powi(-k) + t.abs()).sqrt() / two.powf(T::lit(1.5 * k as f64));
                    let v = match &batch {
                        Ok(b) => Ok((b[i], norm)),
                        Err(e) => Err(e.clone()),
                    };
                    row_from(cone.sigma(), Some(k), t, pts, v)
                })
                .collect()
        })
        .collect();
    Ok(blocks.into_iter().flatten().collect())
}

fn per_k_sups(rows: &[SweepRow], sigma: f64, ks: &[i32]) -> Vec<KSup> {
    ks.iter()
        .map(|&k| KSup {
            k,
            sup: sup(rows.iter().filter(|r| r.sigma == sigma && r.k == Some(k))),
        })
        .collect()
}

/// Records `|I_k(t, x, y)| / [2^{3k/2} (2^{−k} + |t|)^{−1/2}]` over the grid.
pub fn sweep_half_wave<T: Real + Serialize>(
    grid: &SweepGrid<T>,
    opts: &SweepOptions,
) -> Result<BoundReport> {
    let start = Instant::now();
    grid.validate(SweepKind::HalfWave)?;
    let (rows, failures) = collect(half_wave_rows(grid, opts.half_wave)?);
    let sigmas: Vec<f64> = grid.sigma_list.iter().map(|s| s.as_f64()).collect();
    let sups = sigma_sups(&rows, &sigmas);
    let refined = if opts.refine {
        let (r, _) = collect(half_wave_rows(&grid.refined(), opts.half_wave)?);
        Some(sigma_sups(&r, &sigmas))
    } else {
        None
    };
    let mut report = assemble(
        SweepKind::HalfWave,
        echo(grid),
        rows,
        failures,
        &sigmas,
        &sups,
        refined,
        start,
    );
    let mut uniform = true;
    for s in &mut report.per_sigma {
        s.per_k = per_k_sups(&report.rows, s.sigma, &grid.k_list);
        let hi = s.per_k.iter().map(|k| k.sup).fold(0.0, f64::max);
        let lo = s.per_k.iter().map(|k| k.sup).fold(f64::INFINITY, f64::min);
        let spread = hi / lo;
        uniform &= spread.is_finite() && spread < K_UNIFORMITY;
        s.uniformity = Some(spread);
    }
    report.k_uniform = Some(uniform);
    report.runtime_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Angle grid for [`sweep_a_sigma`], in turns of the cone period.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleGrid<T> {
    pub sigma_list: Vec<T>,
    pub turns: Vec<T>,
    pub tol: T,
}

impl<T: Real> AngleGrid<T> {
    /// `n` equally spaced angle differences over one period.
    pub fn uniform(sigma_list: Vec<T>, n: usize, tol: T) -> Self {
        let turns = (0..n)
            .map(|i| T::from_usize_lossy(i) / T::from_usize_lossy(n))
            .collect();
        Self { sigma_list, turns, tol }
    }

    fn refined(&self) -> Self {
        let mut turns = Vec::with_capacity(2 * self.turns.len());
        for w in self.turns.windows(2) {
            turns.push(w[0]);
            turns.push(T::lit(0.5) * (w[0] + w[1]));
        }
        turns.extend(self.turns.last());
        Self {
            turns,
            ..self.clone()
        }
    }
}

fn a_sigma_rows<T: Real>(
    grid: &AngleGrid<T>,
    tol: T,
) -> Result<Vec<(SweepRow, Option<String>)>> {
    let mut jobs = Vec::new();
    for &sigma in &grid.sigma_list {
        let cone = ConeAngle::new(sigma)?;
        for &turn in &grid.turns {
            jobs.push((cone, turn * cone.period()));
        }
    }
    Ok(jobs
        .par_iter()
        .map(|&(cone, dtheta)| {
            let sigma = cone.sigma();
            let bound = l1_bound(sigma);
            let base = |value: f64, ratio: f64, err: f64| SweepRow {
                sigma: sigma.as_f64(),
                k: None,
                t: dtheta.as_f64(),
                points: None,
                value: [value, 0.0],
                ratio,
                err_estimate: err,
            };
            match a_sigma_l1(dtheta, T::zero(), cone, tol) {
                Ok(e) => (base(e.value.as_f64(), (e.value / bound).as_f64(), e.error.as_f64()), None),
                Err(e) => (base(f64::NAN, f64::NAN, f64::NAN), Some(e.to_string())),
            }
        })
        .collect())
}

/// `σ (π/2 + 1/(e − 1))`, the bound on `∫_0^∞ |A_σ| ds` from the majorants.
pub fn l1_bound<T: Real>(sigma: T) -> T {
    sigma * (T::FRAC_PI_2() + (T::E() - T::one()).recip())
}

/// Checks the head and tail majorants for every term of `A_σ` over the
/// angle grid; see [`MajorantCheck`].
pub fn majorant_check<T: Real>(sigma: T, turns: &[T], l1_values: &[f64]) -> Result<MajorantCheck> {
    let cone = ConeAngle::new(sigma)?;
    let e1 = T::E() - T::one();
    let slack = T::one() + T::lit(64.0) * T::epsilon();
    let cfg = QuadratureConfig::with_tol(T::lit(1e-12));
    let mut samples = 0;
    let mut violations = 0;
    let mut worst = T::zero();
    let mut head_max = T::zero();
    for &turn in turns {
        let dens = DiffractionDensity::new(turn * cone.period(), cone);
        for phi in dens.angles() {
            let (s, c) = phi.sin_cos();
            let sa = s.abs();
            if sa == T::zero() {
                continue;
            }
            let a = T::one() - c;
            let head = |v: T| sa / ((v + a) * (v + a) + s * s);
            for i in 0..=200 {
                let v = e1 * T::from_usize_lossy(i) / T::lit(200.0);
                let (h, g) = (head(v), sa / (v * v + s * s));
                samples += 1;
                worst = worst.max(h / g);
                if h > g * slack {
                    violations += 1;
                }
            }
            for i in 0..=200 {
                let u = T::one() + T::lit(39.0) * T::from_usize_lossy(i) / T::lit(200.0);
                // Same term written as |sin φ| / (2 cosh u − 2 cos φ).
                let term = sa / (T::lit(2.0) * (u.cosh() - c));
                let env = u.exp() / (u.exp_m1() * u.exp_m1());
                // The coarser e^{−u/2} majorant must hold as well.
                let coarse = (-T::lit(0.5) * u).exp();
                samples += 2;
                worst = worst.max(term / env).max(term / coarse);
                if term > env * slack {
                    violations += 1;
                }
                if term > coarse * slack {
                    violations += 1;
                }
            }
            let h = integrate_real("majorant head integral", head, &[T::zero(), e1], &cfg)?;
            head_max = head_max.max(h.value);
        }
    }
    let bound = l1_bound(sigma).as_f64();
    let l1_ok = l1_values.iter().all(|&v| v <= bound);
    let head_ok = head_max <= T::FRAC_PI_2();
    Ok(MajorantCheck {
        samples,
        violations,
        worst_ratio: worst.as_f64(),
        head_integral_max: head_max.as_f64(),
        l1_bound: bound,
        passed: violations == 0 && l1_ok && head_ok,
    })
}

/// Records `∫_0^∞ |A_σ(s, Δθ)| ds` over the angle grid, together with its
/// change under tolerance halving and grid doubling, the angle uniformity
/// and the majorant checks. The ratio column is the value over
/// [`l1_bound`].
pub fn sweep_a_sigma<T: Real + Serialize>(grid: &AngleGrid<T>, opts: &SweepOptions) -> Result<BoundReport> {
    let start = Instant::now();
    if grid.sigma_list.is_empty() || grid.turns.is_empty() {
        return Err(Error::InvalidInput("angle grid: lists must be nonempty".into()));
    }
    if !(grid.tol > T::zero()) {
        return Err(Error::InvalidInput("angle grid: tol must be positive".into()));
    }
    let (rows, failures) = collect(a_sigma_rows(grid, grid.tol)?);
    let (halved, _) = collect(a_sigma_rows(grid, grid.tol * T::lit(0.5))?);
    let sigmas: Vec<f64> = grid.sigma_list.iter().map(|s| s.as_f64()).collect();
    // The sup is over the raw integrals, not the normalized ratios.
    let value_sup = |rows: &[SweepRow], s: f64| {
        rows.iter()
            .filter(|r| r.sigma == s)
            .map(|r| r.value[0])
            .filter(|v| v.is_finite())
            .fold(0.0, f64::max)
    };
    let sups: Vec<f64> = sigmas.iter().map(|&s| value_sup(&rows, s)).collect();
    let refined = if opts.refine {
        let (r, _) = collect(a_sigma_rows(&grid.refined(), grid.tol)?);
        Some(sigmas.iter().map(|&s| value_sup(&r, s)).collect::<Vec<_>>())
    } else {
        None
    };
    let mut per_sigma = Vec::with_capacity(sigmas.len());
    for (i, (&sigma_t, &sigma)) in grid.sigma_list.iter().zip(&sigmas).enumerate() {
        let vals: Vec<f64> = rows.iter().filter(|r| r.sigma == sigma).map(|r| r.value[0]).collect();
        let change = rows
            .iter()
            .zip(&halved)
            .filter(|(r, _)| r.sigma == sigma)
            .map(|(a, b)| (a.value[0] - b.value[0]).abs())
            .fold(0.0, f64::max);
        let nonzero: Vec<f64> = vals.iter().copied().filter(|v| *v > 0.0).collect();
        let uniformity = if nonzero.is_empty() {
            None
        } else {
            let hi = nonzero.iter().copied().fold(0.0, f64::max);
            let lo = nonzero.iter().copied().fold(f64::INFINITY, f64::min);
            Some(hi / lo)
        };
        per_sigma.push(SigmaSummary {
            sigma,
            sup: sups[i],
            per_k: Vec::new(),
            uniformity,
            refined_sup: refined.as_ref().map(|r| r[i]),
            tolerance_change: Some(change),
            majorant: Some(majorant_check(sigma_t, &grid.turns, &vals)?),
        });
    }
    // A zero row stays stable only if it stays exactly zero.
    let stable = refined.as_ref().map(|r| {
        sups.iter()
            .zip(r)
            .all(|(a, b)| b.is_finite() && relative_change(*a, *b) < STABILITY_TOL)
    });
    Ok(BoundReport {
        kind: SweepKind::ASigma,
        config: echo(grid),
        empirical_constant: sups.iter().copied().fold(0.0, f64::max),
        rows,
        failures,
        per_sigma,
        stable,
        k_uniform: None,
        runtime_seconds: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_grid() -> SweepGrid<f64> {
        SweepGrid {
            sigma_list: vec![1.0, 2.0],
            t_list: vec![-1.0, 0.3, 2.0],
            k_list: vec![0, 1],
            point_pairs: vec![
                PointPair::turns(1.0, 0.0, 1.0, 0.0),
                PointPair::radians(0.5, 0.0, 1.5, 1.2),
            ],
            tol: 1e-8,
            refinement: 0,
        }
    }

    #[test]
    fn flat_schrodinger_ratio_is_constant() {
        let mut g = small_grid();
        g.sigma_list = vec![1.0];
        let r = sweep_schrodinger(&g, &SweepOptions::default()).unwrap();
        let c = 1.0 / (4.0 * std::f64::consts::PI);
        assert!(r.rows.iter().all(|row| (row.ratio - c).abs() < 1e-12));
        assert_eq!(r.stable, Some(true));
        assert!(r.verified());
    }

    #[test]
    fn refinement_doubles_density() {
        let g = small_grid().refined();
        let ts = g.times();
        assert_eq!(ts.len(), 4);
        assert!((ts[2] - (0.3f64 * 2.0).sqrt()).abs() < 1e-15);
        let cone = ConeAngle::new(2.0).unwrap();
        let ps = g.pairs(cone).unwrap();
        assert_eq!(ps.len(), 3);
        assert!((ps[1].1.theta - 0.6).abs() < 1e-15 && (ps[1].1.r - 1.25).abs() < 1e-15);
        assert_eq!(g.refined().pairs(cone).unwrap().len(), 5);
    }

    #[test]
    fn validation() {
        let mut g = small_grid();
        g.t_list.push(0.0);
        assert!(sweep_schrodinger(&g, &SweepOptions::default()).is_err());
        g.t_list.clear();
        assert!(g.validate(SweepKind::ASigma).is_ok());
        assert!(g.validate(SweepKind::HalfWave).is_err());
        let mut g = small_grid();
        g.k_list.clear();
        assert!(g.validate(SweepKind::HalfWave).is_err());
    }

    #[test]
    fn csv_is_deterministic() {
        let opts = SweepOptions {
            refine: false,
            ..Default::default()
        };
        let a = sweep_half_wave(&small_grid(), &opts).unwrap();
        let b = sweep_half_wave(&small_grid(), &opts).unwrap();
        let (mut x, mut y) = (Vec::new(), Vec::new());
        a.write_csv(&mut x).unwrap();
        b.write_csv(&mut y).unwrap();
        assert_eq!(x, y);
        let text = String::from_utf8(x).unwrap();
        assert!(text.starts_with("sigma,k,t,r1,theta1,r2,theta2,value_re,value_im,ratio,err_estimate\n"));
        assert_eq!(text.lines().count(), 1 + 2 * 2 * 2 * 3);
    }

    #[test]
    fn a_sigma_sweep_rows() {
        let g = AngleGrid::uniform(vec![1.0, 2.0], 16, 1e-9);
        let r = sweep_a_sigma(&g, &SweepOptions::default()).unwrap();
        assert_eq!(r.per_sigma[0].sup, 0.0);
        assert!(r.per_sigma[1].sup > 0.0 && r.per_sigma[1].sup <= l1_bound(2.0));
        assert!(r.per_sigma[1].majorant.as_ref().unwrap().passed);
        assert!(r.per_sigma[1].tolerance_change.unwrap() < 1e-8);
        assert!(r.verified(), "{:?}", r.per_sigma);
    }
}
