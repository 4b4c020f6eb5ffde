//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 numerical-tolerance failure,
//! 3 internal error. Every failure writes one JSON line
//! `{"error": kind, "code": n, "message": ...}` to the error stream.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::Error;
use crate::geometry::{ConeAngle, ConePoint};
use crate::harness::{sweep_a_sigma, sweep_half_wave, sweep_schrodinger, AngleGrid, BoundReport, SweepGrid, SweepOptions};
use crate::kernels::{
    half_wave_localized, resolvent_kernel, schrodinger_kernel, spectral_measure_density, KernelValue, Sign,
};
use crate::oracle::{mode_sum_resolvent, mode_sum_schrodinger, mode_sum_spectral, ModeSumConfig};
use crate::quadrature::QuadratureConfig;
use crate::scalar::Cplx;

/// Environment variable overriding the default tolerance.
pub const TOL_ENV: &str = "CONE_SPECTRAL_TOL";

pub const DEFAULT_TOL: f64 = 1e-8;

#[derive(Parser, Debug)]
#[command(name = "cone-spectral", version, about = "Kernels of the Laplacian on flat Euclidean cones")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads for parallel sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a closed-form kernel.
    Eval {
        kernel: EvalKernel,
        #[command(flatten)]
        args: PointArgs,
    },
    /// Compare a closed-form kernel with the angular mode sum.
    OracleCompare {
        kernel: OracleKernel,
        #[command(flatten)]
        args: PointArgs,
        /// Largest accepted discrepancy (relative for the resolvent).
        #[arg(long, default_value_t = 1e-6)]
        max_discrepancy: f64,
    },
    /// Run a dispersive sweep on the default or a supplied grid.
    Sweep {
        kind: SweepArg,
        /// JSON grid file (a sweep grid, or an angle grid for `asigma`).
        #[arg(long)]
        grid: Option<PathBuf>,
        /// Skip the doubled-grid stability run.
        #[arg(long)]
        no_refine: bool,
        /// Also write the per-point CSV here.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        out: OutputArgs,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Run the invariant suite; exit 0 iff every check passes.
    Selftest {
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum EvalKernel {
    Schrodinger,
    Resolvent,
    Spectral,
    Halfwave,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum OracleKernel {
    Schrodinger,
    Resolvent,
    Spectral,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum SweepArg {
    Schrodinger,
    Halfwave,
    Asigma,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum SignArg {
    #[value(alias = "+", alias = "outgoing")]
    Plus,
    #[value(alias = "-", alias = "incoming")]
    Minus,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Default, ValueEnum)]
enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Output file (default: standard output).
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PointArgs {
    #[arg(long)]
    sigma: f64,
    /// First point as `r,theta` (radians).
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    p1: (f64, f64),
    /// Second point as `r,theta` (radians).
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    p2: (f64, f64),
    #[arg(long, allow_hyphen_values = true)]
    t: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    /// Dyadic frequency index of the half-wave kernel.
    #[arg(long, allow_hyphen_values = true)]
    k: Option<i32>,
    #[arg(long, value_enum, default_value_t = SignArg::Plus)]
    sign: SignArg,
    #[arg(long)]
    tol: Option<f64>,
    #[command(flatten)]
    out: OutputArgs,
}

fn parse_point(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected r,theta but got {:?}", s))?;
    let r = a.trim().parse::<f64>().map_err(|e| format!("bad r in {:?}: {}", s, e))?;
    let th = b.trim().parse::<f64>().map_err(|e| format!("bad theta in {:?}: {}", s, e))?;
    Ok((r, th))
}

/// Configuration echo written with every evaluation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub kernel: String,
    pub sigma: f64,
    pub p1: [f64; 2],
    pub p2: [f64; 2],
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k: Option<i32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sign: Option<String>,
    pub tol: f64,
}

/// Serialized kernel value: `[re, im]` pairs and the error estimate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValueRecord {
    pub geometric: [f64; 2],
    pub diffractive: [f64; 2],
    pub total: [f64; 2],
    pub err: f64,
}

impl From<KernelValue<f64>> for ValueRecord {
    fn from(v: KernelValue<f64>) -> Self {
        let p = |z: Cplx<f64>| [z.re, z.im];
        Self {
            geometric: p(v.geometric),
            diffractive: p(v.diffractive),
            total: p(v.total),
            err: v.error,
        }
    }
}

enum Failure {
    Usage(String),
    Tolerance(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Tolerance(_) => 2,
            Failure::Internal(_) => 3,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain { .. } | Error::InvalidInput(_) => Failure::Usage(e.to_string()),
            Error::AccuracyLoss { .. } | Error::NonConvergence { .. } | Error::TruncationInsufficient { .. } => {
                Failure::Tolerance(e.to_string())
            }
            Error::Io(_) | Error::Json(_) | Error::Csv(_) => Failure::Internal(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Internal(e.to_string())
    }
}

type Outcome = std::result::Result<i32, Failure>;

/// Parses `argv`, runs the subcommand and returns the exit status. Output
/// goes to `--output` or `out`; warnings and errors go to `err`.
pub fn run<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{}", e);
                return 0;
            }
            let msg = e.kind().to_string();
            let detail = e.to_string();
            let first = detail.lines().next().unwrap_or(&msg).trim_start_matches("error: ");
            return report(err, Failure::Usage(first.to_string()));
        }
    };
    match dispatch(cli, out, err) {
        Ok(code) => code,
        Err(f) => report(err, f),
    }
}

fn report(err: &mut dyn Write, f: Failure) -> i32 {
    let (kind, msg) = match &f {
        Failure::Usage(m) => ("usage", m),
        Failure::Tolerance(m) => ("tolerance", m),
        Failure::Internal(m) => ("internal", m),
    };
    let _ = writeln!(err, "{}", json!({"error": kind, "code": f.code(), "message": msg}));
    f.code()
}

fn tolerance(flag: Option<f64>) -> std::result::Result<f64, Failure> {
    let tol = match flag {
        Some(t) => t,
        None => match std::env::var(TOL_ENV) {
            Ok(v) => v
                .trim()
                .parse::<f64>()
                .map_err(|_| Failure::Usage(format!("{} = {:?} is not a number", TOL_ENV, v)))?,
            Err(_) => DEFAULT_TOL,
        },
    };
    if tol > 0.0 && tol.is_finite() {
        Ok(tol)
    } else {
        Err(Failure::Usage(format!("tolerance {} must be positive", tol)))
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::Usage("--threads must be positive".into()));
        }
        // A pool may already exist when called repeatedly in one process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match cli.command {
        Command::Eval { kernel, args } => eval(kernel, &args, out, err),
        Command::OracleCompare {
            kernel,
            args,
            max_discrepancy,
        } => oracle_compare(kernel, &args, max_discrepancy, out, err),
        Command::Sweep {
            kind,
            grid,
            no_refine,
            csv,
            out: o,
            tol,
        } => sweep(kind, grid, no_refine, csv, &o, tol, out),
        Command::Selftest { out: o } => {
            let r = crate::selftest::run();
            let mut w = sink(&o, out)?;
            match o.format {
                Format::Json => writeln!(w, "{}", serde_json::to_string_pretty(&r).map_err(Error::from)?)?,
                Format::Csv => {
                    writeln!(w, "name,passed,measured,tolerance")?;
                    for c in &r.checks {
                        writeln!(w, "{},{},{:e},{:e}", c.name, c.passed, c.measured, c.tolerance)?;
                    }
                }
            }
            w.flush()?;
            Ok(if r.passed() { 0 } else { 2 })
        }
    }
}

fn sink<'a>(o: &OutputArgs, out: &'a mut dyn Write) -> std::result::Result<Box<dyn Write + 'a>, Failure> {
    Ok(match &o.output {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(out),
    })
}

struct Inputs {
    cone: ConeAngle<f64>,
    p1: ConePoint<f64>,
    p2: ConePoint<f64>,
    tol: f64,
}

fn inputs(args: &PointArgs, err: &mut dyn Write) -> std::result::Result<Inputs, Failure> {
    let cone = ConeAngle::new(args.sigma)?;
    let tol = tolerance(args.tol)?;
    let mut point = |name: &str, (r, th): (f64, f64)| -> std::result::Result<ConePoint<f64>, Failure> {
        let p = ConePoint::new(r, th, cone)?;
        if cone.normalize_angle(th).1 {
            let _ = writeln!(
                err,
                "{}",
                json!({"warning": "angle normalized", "point": name, "theta": th, "normalized": p.theta})
            );
        }
        Ok(p)
    };
    let p1 = point("p1", args.p1)?;
    let p2 = point("p2", args.p2)?;
    Ok(Inputs { cone, p1, p2, tol })
}

fn require<T: Copy>(v: Option<T>, flag: &str, kernel: &str) -> std::result::Result<T, Failure> {
    v.ok_or_else(|| Failure::Usage(format!("{} requires --{}", kernel, flag)))
}

fn echo(kernel: &str, args: &PointArgs, tol: f64) -> EvalConfig {
    EvalConfig {
        kernel: kernel.to_string(),
        sigma: args.sigma,
        p1: [args.p1.0, args.p1.1],
        p2: [args.p2.0, args.p2.1],
        t: args.t,
        lambda: args.lambda,
        k: args.k,
        sign: None,
        tol,
    }
}

fn sign_of(s: SignArg) -> Sign {
    match s {
        SignArg::Plus => Sign::Outgoing,
        SignArg::Minus => Sign::Incoming,
    }
}

fn eval(kernel: EvalKernel, args: &PointArgs, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let inp = inputs(args, err)?;
    let cfg = QuadratureConfig::with_tol(inp.tol);
    let (name, value, param, ratio) = match kernel {
        EvalKernel::Schrodinger => {
            let t = require(args.t, "t", "schrodinger")?;
            let v = schrodinger_kernel(t, &inp.p1, &inp.p2, inp.cone, &cfg)?;
            ("schrodinger", v, vec![t], Some(t.abs() * v.total.norm()))
        }
        EvalKernel::Resolvent => {
            let l = require(args.lambda, "lambda", "resolvent")?;
            let v = resolvent_kernel(l, sign_of(args.sign), &inp.p1, &inp.p2, inp.cone, &cfg)?;
            ("resolvent", v, vec![l], None)
        }
        EvalKernel::Spectral => {
            let l = require(args.lambda, "lambda", "spectral")?;
            let v = spectral_measure_density(l, &inp.p1, &inp.p2, inp.cone, &cfg)?;
            ("spectral", v, vec![l], None)
        }
        EvalKernel::Halfwave => {
            let t = require(args.t, "t", "halfwave")?;
            let k = require(args.k, "k", "halfwave")?;
            let v = half_wave_localized(t, k, &inp.p1, &inp.p2, inp.cone, &cfg)?;
            let norm = (2f64.powi(-k) + t.abs()).sqrt() / 2f64.powf(1.5 * k as f64);
            ("halfwave", v, vec![k as f64, t], Some(v.total.norm() * norm))
        }
    };
    let mut config = echo(name, args, inp.tol);
    if kernel == EvalKernel::Resolvent {
        config.sign = Some(if sign_of(args.sign) == Sign::Outgoing { "+" } else { "-" }.into());
    }
    let rec = ValueRecord::from(value);
    let mut w = sink(&args.out, out)?;
    match args.out.format {
        Format::Json => {
            let doc = json!({"config": config, "result": rec});
            writeln!(w, "{}", serde_json::to_string_pretty(&doc).map_err(Error::from)?)?;
        }
        Format::Csv => {
            let head = match kernel {
                EvalKernel::Schrodinger => "sigma,t",
                EvalKernel::Resolvent | EvalKernel::Spectral => "sigma,lambda",
                EvalKernel::Halfwave => "sigma,k,t",
            };
            writeln!(w, "{},r1,theta1,r2,theta2,value_re,value_im,ratio,err_estimate", head)?;
            let mut fields: Vec<String> = vec![format!("{:e}", args.sigma)];
            fields.extend(param.iter().enumerate().map(|(i, x)| {
                if kernel == EvalKernel::Halfwave && i == 0 {
                    format!("{}", *x as i32)
                } else {
                    format!("{:e}", x)
                }
            }));
            for x in [inp.p1.r, inp.p1.theta, inp.p2.r, inp.p2.theta, rec.total[0], rec.total[1]] {
                fields.push(format!("{:e}", x));
            }
            fields.push(ratio.map(|r| format!("{:e}", r)).unwrap_or_default());
            fields.push(format!("{:e}", rec.err));
            writeln!(w, "{}", fields.join(","))?;
        }
    }
    w.flush()?;
    Ok(0)
}

fn oracle_compare(
    kernel: OracleKernel,
    args: &PointArgs,
    max_discrepancy: f64,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome {
    let inp = inputs(args, err)?;
    let cfg = QuadratureConfig::with_tol(inp.tol);
    let mc = ModeSumConfig::default();
    let (name, kv, oracle, oracle_err, discrepancy) = match kernel {
        OracleKernel::Schrodinger => {
            let t = require(args.t, "t", "schrodinger")?;
            let kv = schrodinger_kernel(t, &inp.p1, &inp.p2, inp.cone, &cfg)?;
            let o = mode_sum_schrodinger(t, &inp.p1, &inp.p2, inp.cone, None, &mc)?;
            let d = (kv.total - o.value).norm();
            ("schrodinger", kv, o.value, o.extrapolation_error + o.tail_bound, d)
        }
        OracleKernel::Resolvent => {
            let l = require(args.lambda, "lambda", "resolvent")?;
            let s = sign_of(args.sign);
            let kv = resolvent_kernel(l, s, &inp.p1, &inp.p2, inp.cone, &cfg)?;
            let o = mode_sum_resolvent(l, s, &inp.p1, &inp.p2, inp.cone, &mc)?;
            let d = (kv.total - o.value).norm() / o.value.norm();
            ("resolvent", kv, o.value, o.tail_bound, d)
        }
        OracleKernel::Spectral => {
            let l = require(args.lambda, "lambda", "spectral")?;
            let kv = spectral_measure_density(l, &inp.p1, &inp.p2, inp.cone, &cfg)?;
            let o = mode_sum_spectral(l, &inp.p1, &inp.p2, inp.cone, &mc)?;
            let d = (kv.total.re - o.value.re).abs();
            ("spectral", kv, o.value, o.tail_bound, d)
        }
    };
    let mut config = echo(name, args, inp.tol);
    if kernel == OracleKernel::Resolvent {
        config.sign = Some(if sign_of(args.sign) == Sign::Outgoing { "+" } else { "-" }.into());
    }
    let passed = discrepancy <= max_discrepancy;
    let mut w = sink(&args.out, out)?;
    match args.out.format {
        Format::Json => {
            let doc = json!({
                "config": config,
                "result": ValueRecord::from(kv),
                "oracle": {"value": [oracle.re, oracle.im], "err": oracle_err},
                "discrepancy": discrepancy,
                "max_discrepancy": max_discrepancy,
                "passed": passed,
            });
            writeln!(w, "{}", serde_json::to_string_pretty(&doc).map_err(Error::from)?)?;
        }
        Format::Csv => {
            writeln!(w, "kernel,sigma,closed_re,closed_im,oracle_re,oracle_im,discrepancy")?;
            writeln!(
                w,
                "{},{:e},{:e},{:e},{:e},{:e},{:e}",
                name, args.sigma, kv.total.re, kv.total.im, oracle.re, oracle.im, discrepancy
            )?;
        }
    }
    w.flush()?;
    if passed {
        Ok(0)
    } else {
        Err(Failure::Tolerance(format!(
            "discrepancy {:e} exceeds {:e}",
            discrepancy, max_discrepancy
        )))
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> std::result::Result<T, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {}", path.display(), e)))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {}", path.display(), e)))
}

fn sweep(
    kind: SweepArg,
    grid: Option<PathBuf>,
    no_refine: bool,
    csv: Option<PathBuf>,
    o: &OutputArgs,
    tol: Option<f64>,
    out: &mut dyn Write,
) -> Outcome {
    let opts = SweepOptions {
        refine: !no_refine,
        ..Default::default()
    };
    let tol_override = match tol {
        Some(_) => Some(tolerance(tol)?),
        None => std::env::var(TOL_ENV).ok().map(|_| tolerance(None)).transpose()?,
    };
    let report: BoundReport = match kind {
        SweepArg::Schrodinger | SweepArg::Halfwave => {
            let mut g: SweepGrid<f64> = match &grid {
                Some(p) => read_json(p)?,
                None => SweepGrid::default_grid(),
            };
            if let Some(t) = tol_override {
                g.tol = t;
            }
            if kind == SweepArg::Schrodinger {
                sweep_schrodinger(&g, &opts)?
            } else {
                sweep_half_wave(&g, &opts)?
            }
        }
        SweepArg::Asigma => {
            let mut g: AngleGrid<f64> = match &grid {
                Some(p) => read_json(p)?,
                None => AngleGrid::uniform(vec![1.5, 2.0, 3.0], 64, 1e-9),
            };
            if let Some(t) = tol_override {
                g.tol = t;
            }
            sweep_a_sigma(&g, &opts)?
        }
    };
    if let Some(path) = &csv {
        report.write_csv(BufWriter::new(File::create(path)?))?;
    }
    let mut w = sink(o, out)?;
    match o.format {
        Format::Json => writeln!(w, "{}", serde_json::to_string_pretty(&report).map_err(Error::from)?)?,
        Format::Csv => report.write_csv(&mut w)?,
    }
    w.flush()?;
    if report.verified() {
        Ok(0)
    } else {
        Err(Failure::Tolerance(format!(
            "sweep not verified: {} failed points, stable = {:?}, k_uniform = {:?}",
            report.failures.len(),
            report.stable,
            report.k_uniform
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("cone-spectral").chain(args.iter().copied()), &mut o, &mut e);
        (code, String::from_utf8(o).unwrap(), String::from_utf8(e).unwrap())
    }

    #[test]
    fn parse_points() {
        assert_eq!(parse_point("1.5,-0.25"), Ok((1.5, -0.25)));
        assert!(parse_point("1.5").is_err());
        assert!(parse_point("a,1").is_err());
    }

    #[test]
    fn usage_errors_exit_one() {
        let (code, _, err) = call(&["eval", "schrodinger", "--sigma", "1", "--p1", "1,0", "--p2", "2,0"]);
        assert_eq!(code, 1);
        let v: serde_json::Value = serde_json::from_str(err.trim()).unwrap();
        assert_eq!(v["error"], "usage");
        let (code, _, _) = call(&["eval", "bogus"]);
        assert_eq!(code, 1);
        let (code, _, _) = call(&["eval", "spectral", "--sigma", "-1", "--lambda", "1", "--p1", "1,0", "--p2", "2,0"]);
        assert_eq!(code, 1);
    }

    #[test]
    fn angle_warning() {
        let (code, out, err) = call(&[
            "eval", "spectral", "--sigma", "1", "--lambda", "1", "--p1", "1,7", "--p2", "2,0",
        ]);
        assert_eq!(code, 0);
        assert!(err.contains("angle normalized"));
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["config"]["p1"][1], 7.0);
    }
}
