use std::process::{Command, Output};

use cone_spectral::cli::EvalConfig;
use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_cone-spectral"));
    c.env_remove(cone_spectral::cli::TOL_ENV);
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn eval_on_the_plane_matches_the_free_propagator() {
    let o = run(&["eval", "schrodinger", "--sigma", "1", "--t", "0.5", "--p1", "1,0", "--p2", "2,0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    let d2 = 5.0 - 4.0 * 0.5f64.cos();
    let phase = d2 / 2.0;
    // e^{i d²/(4t)} / (4πit) with t = 1/2
    let (re, im) = (phase.sin() / (2.0 * std::f64::consts::PI), -phase.cos() / (2.0 * std::f64::consts::PI));
    let total = &v["result"]["total"];
    assert!((total[0].as_f64().unwrap() - re).abs() < 1e-12);
    assert!((total[1].as_f64().unwrap() - im).abs() < 1e-12);
    assert_eq!(v["result"]["diffractive"][0], 0.0);
}

#[test]
fn config_echo_round_trips() {
    let args = [
        "eval", "resolvent", "--sigma", "1.5", "--lambda", "0.7", "--sign", "-", "--p1", "1.25,0.1", "--p2",
        "0.3,2.5", "--tol", "1e-9",
    ];
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    let cfg: EvalConfig = serde_json::from_value(v["config"].clone()).unwrap();
    assert_eq!(
        cfg,
        EvalConfig {
            kernel: "resolvent".into(),
            sigma: 1.5,
            p1: [1.25, 0.1],
            p2: [0.3, 2.5],
            t: None,
            lambda: Some(0.7),
            k: None,
            sign: Some("-".into()),
            tol: 1e-9,
        }
    );
    assert_eq!(serde_json::to_value(&cfg).unwrap(), v["config"]);
}

#[test]
fn oracle_compare_spectral() {
    let o = run(&["oracle-compare", "spectral", "--sigma", "1.5", "--lambda", "2", "--p1", "1,0", "--p2", "1,1"]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert!(v["discrepancy"].as_f64().unwrap() <= 1e-7);
    assert_eq!(v["passed"], true);
}

#[test]
fn oracle_compare_threshold_gives_tolerance_exit() {
    let o = run(&[
        "oracle-compare", "resolvent", "--sigma", "2", "--lambda", "1", "--p1", "1,0", "--p2", "0.5,1",
        "--max-discrepancy", "1e-30",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let e: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(e["error"], "tolerance");
}

#[test]
fn selftest_passes() {
    let o = run(&["selftest"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn usage_and_domain_errors() {
    assert_eq!(run(&[]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    let o = run(&["eval", "resolvent", "--sigma", "2", "--lambda", "1", "--p1", "1,0", "--p2", "1,0"]);
    assert_eq!(o.status.code(), Some(1));
    let e: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(e["code"], 1);
    let o = bin()
        .env(cone_spectral::cli::TOL_ENV, "nope")
        .args(["eval", "spectral", "--sigma", "2", "--lambda", "1", "--p1", "1,0", "--p2", "2,0"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn tolerance_env_and_flag_precedence() {
    let args = ["eval", "spectral", "--sigma", "2", "--lambda", "1", "--p1", "1,0", "--p2", "2,0"];
    let o = bin().env(cone_spectral::cli::TOL_ENV, "1e-6").args(args).output().unwrap();
    assert_eq!(stdout_json(&o)["config"]["tol"], 1e-6);
    let o = bin()
        .env(cone_spectral::cli::TOL_ENV, "1e-6")
        .args(args)
        .args(["--tol", "1e-10"])
        .output()
        .unwrap();
    assert_eq!(stdout_json(&o)["config"]["tol"], 1e-10);
    assert_eq!(stdout_json(&run(&args))["config"]["tol"], 1e-8);
}

#[test]
fn eval_csv_and_output_file() {
    let dir = std::env::temp_dir().join(format!("cone-spectral-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("hw.csv");
    let o = run(&[
        "eval", "halfwave", "--sigma", "1.5", "--t", "-0.4", "--k", "1", "--p1", "1,0", "--p2", "0.8,2",
        "--format", "csv", "--output", path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "sigma,k,t,r1,theta1,r2,theta2,value_re,value_im,ratio,err_estimate"
    );
    assert_eq!(lines.next().unwrap().split(',').count(), 11);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn sweep_from_grid_file_is_thread_count_independent() {
    let dir = std::env::temp_dir().join(format!("cone-spectral-sweep-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let grid = dir.join("grid.json");
    std::fs::write(
        &grid,
        r#"{"sigma_list": [1.0, 1.5], "t_list": [-1.0, 0.3],
            "point_pairs": [{"r1": 1.0, "theta1": 0.0, "r2": 2.0, "theta2": 0.25},
                            {"r1": 0.5, "theta1": 0.0, "r2": 0.7, "theta2": 3.0, "unit": "radians"}],
            "tol": 1e-9}"#,
    )
    .unwrap();
    let csv = |threads: &str| {
        let o = run(&[
            "sweep", "schrodinger", "--grid", grid.to_str().unwrap(), "--format", "csv", "--threads", threads,
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        o.stdout
    };
    let one = csv("1");
    assert_eq!(one, csv("2"));
    let text = String::from_utf8(one).unwrap();
    assert!(text.starts_with("sigma,t,r1,theta1,r2,theta2,value_re,value_im,ratio,err_estimate\n"));
    assert!(text.lines().count() > 1);
    std::fs::remove_dir_all(&dir).unwrap();
}
