use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use automorph::signals::GridFunction;
use automorph::solvers::FixedPointReport;
use automorph_cli::{AaTestOutput, CheckResult, LasotaReport, LinearReport, MeanOutput};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;
use tempfile::TempDir;

fn config(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(format!("{name}.json"))
}

fn automorph(sub: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_automorph"))
        .arg(sub)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .args(extra)
        .output()
        .expect("binary runs")
}

fn run(sub: &str, name: &str) -> (Output, TempDir) {
    let out = tempfile::tempdir().unwrap();
    let output = automorph(sub, &config(name), out.path(), &[]);
    (output, out)
}

fn run_json(sub: &str, json: &Value, extra: &[&str]) -> (Output, TempDir) {
    let out = tempfile::tempdir().unwrap();
    let path = out.path().join("config.json");
    fs::write(&path, serde_json::to_string_pretty(json).unwrap()).unwrap();
    let output = automorph(sub, &path, out.path(), extra);
    (output, out)
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn read_json(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join(name)).unwrap()).unwrap()
}

fn read_csv(dir: &Path) -> GridFunction {
    GridFunction::read_csv(fs::File::open(dir.join("solution.csv")).unwrap()).unwrap()
}

/// Deserializing and re-serializing reproduces the file byte for byte.
fn round_trips<T: DeserializeOwned + Serialize + PartialEq + std::fmt::Debug>(path: &Path) {
    let text = fs::read_to_string(path).unwrap();
    let value: T = automorph::io::from_json_str(&text).unwrap();
    let again = automorph::io::to_json_string(&value).unwrap();
    assert_eq!(again, text, "{}", path.display());
    let reloaded: T = automorph::io::from_json_str(&again).unwrap();
    assert_eq!(reloaded, value);
}

fn base_config(name: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(config(name)).unwrap()).unwrap()
}

#[test]
fn mean_of_constant_signal() {
    let (o, dir) = run("mean", "mean_constant");
    assert_eq!(code(&o), 0);
    let v = read_json(dir.path(), "mean.json");
    assert_eq!(v["mean"], 2.0);
    assert_eq!(v["converged"], true);
    round_trips::<MeanOutput>(&dir.path().join("mean.json"));
}

#[test]
fn mean_of_sine_fails_condition_d() {
    let (o, dir) = run("mean", "mean_sin");
    assert_eq!(code(&o), 0);
    let v = read_json(dir.path(), "mean.json");
    assert!(v["mean"].as_f64().unwrap().abs() < 1e-3);
    assert_eq!(v["condition_d"]["passes"], false);
}

#[test]
fn slowly_varying_mean_is_not_converged() {
    let cfg = serde_json::json!({
        "signal": {"op": "trig", "amplitude": 1.0, "frequency": 0.001, "phase": 0.0, "kind": "cos"}
    });
    let (o, dir) = run_json("mean", &cfg, &[]);
    assert_eq!(code(&o), 2);
    assert_eq!(read_json(dir.path(), "mean.json")["converged"], false);
}

#[test]
fn malformed_config_names_the_field() {
    let mut cfg = base_config("scalar_linear");
    cfg["grid"]["t1"] = Value::String("forty".into());
    let (o, _dir) = run_json("solve", &cfg, &[]);
    assert_eq!(code(&o), 1);
    let stderr = String::from_utf8_lossy(&o.stderr);
    assert!(stderr.contains("grid.t1"), "{stderr}");

    let mut cfg = base_config("scalar_linear");
    cfg["colour"] = Value::Bool(true);
    let (o, _dir) = run_json("solve", &cfg, &[]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("colour"));
}

#[test]
fn scalar_solve_matches_closed_form() {
    let (o, dir) = run("solve", "scalar_linear");
    assert_eq!(code(&o), 0);
    let y = read_csv(dir.path());
    assert!((y.t_end() - 40.0).abs() < 1e-9);
    let err = (0..y.len())
        .map(|k| (y.scalar(k).re - 0.5 * (y.time(k).cos() + y.time(k).sin())).abs())
        .fold(0.0, f64::max);
    assert!(err < 1e-6, "{err}");
    let report = read_json(dir.path(), "report.json");
    assert_eq!(report["method"], "massera");
    round_trips::<LinearReport>(&dir.path().join("report.json"));
}

#[test]
fn zero_forcing_gives_zero_csv() {
    let (o, dir) = run("solve", "zero_forcing");
    assert_eq!(code(&o), 0);
    let y = read_csv(dir.path());
    assert!(y.values().iter().all(|z| z.re == 0.0 && z.im == 0.0));
}

#[test]
fn triangular_solve_is_constant_one() {
    let (o, dir) = run("solve", "triangular");
    assert_eq!(code(&o), 0);
    assert_eq!(read_json(dir.path(), "report.json")["method"], "triangular");
    let y = read_csv(dir.path());
    assert!(y.values().iter().all(|z| (z.re - 1.0).abs() < 1e-6));
}

#[test]
fn delayed_benchmark_converges() {
    let (o, dir) = run("solve", "delayed_benchmark");
    assert_eq!(code(&o), 0);
    let report = read_json(dir.path(), "report.json");
    assert_eq!(report["status"], "converged");
    assert!(report["measured_rate"].as_f64().unwrap() <= 1.2 * report["apriori_rate"].as_f64().unwrap());
    round_trips::<FixedPointReport>(&dir.path().join("report.json"));
}

#[test]
fn precondition_failure_exits_three() {
    let (o, dir) = run("solve", "delayed_precondition_fail");
    assert_eq!(code(&o), 3);
    let report = read_json(dir.path(), "report.json");
    assert_eq!(report["preconditions"]["precondition_4cL"], false);
    assert!(!dir.path().join("solution.csv").exists());
}

#[test]
fn iteration_cap_exits_four() {
    let mut cfg = base_config("delayed_benchmark");
    cfg["max_iter"] = 2.into();
    let (o, dir) = run_json("solve", &cfg, &[]);
    assert_eq!(code(&o), 4);
    assert_eq!(read_json(dir.path(), "report.json")["status"], "max_iter");
}

#[test]
fn grid_and_tol_flags_override_config() {
    let (o, dir) = run_json(
        "solve",
        &base_config("scalar_linear"),
        &["--grid", "0,5,0.05", "--tol", "1e-6"],
    );
    assert_eq!(code(&o), 0);
    let y = read_csv(dir.path());
    assert_eq!(y.len(), 101);
    assert!((y.dt() - 0.05).abs() < 1e-15);
    let (o, _dir) = run_json("solve", &base_config("scalar_linear"), &["--grid", "0,5"]);
    assert_ne!(code(&o), 0);
}

#[test]
fn verify_scalar_example_passes() {
    let (o, dir) = run("verify", "scalar_linear");
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(dir.path().join("verify.json")).unwrap();
    let results: Vec<CheckResult> = automorph::io::from_json_str(&text).unwrap();
    assert_eq!(results.len(), automorph_cli::ALL_CHECKS.len());
    assert!(results.iter().all(|r| r.pass));
    round_trips::<Vec<CheckResult>>(&dir.path().join("verify.json"));
}

#[test]
fn verify_corrupted_dichotomy_fails_green_bound() {
    let (o, dir) = run("verify", "corrupted_dichotomy");
    assert_eq!(code(&o), 5);
    let v = read_json(dir.path(), "verify.json");
    let green = v
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["check"] == "green_bound")
        .unwrap();
    assert_eq!(green["pass"], false);
}

#[test]
fn verify_empty_check_list() {
    let mut cfg = base_config("scalar_linear");
    cfg["checks"] = Value::Array(vec![]);
    let (o, dir) = run_json("verify", &cfg, &[]);
    assert_eq!(code(&o), 0);
    assert_eq!(read_json(dir.path(), "verify.json"), Value::Array(vec![]));

    cfg["checks"] = serde_json::json!(["cocycle", "frobnicate"]);
    let (o, _dir) = run_json("verify", &cfg, &[]);
    assert_eq!(code(&o), 1);
}

#[test]
fn lasota_linear_matches_equilibrium() {
    let (o, dir) = run("lasota", "lasota_linear");
    assert_eq!(code(&o), 0);
    let y = read_csv(dir.path());
    assert!(y.values().iter().all(|z| (z.re - 1.0).abs() < 1e-8));
    let report = read_json(dir.path(), "lasota_report.json");
    assert_eq!(report["condition_d"]["passes"], true);
    assert!((report["gamma_star"].as_f64().unwrap() - 0.2375).abs() < 1e-12);
}

#[test]
fn lasota_canonical_is_stable() {
    let (o, dir) = run("lasota", "lasota_canonical");
    assert_eq!(code(&o), 0);
    let path = dir.path().join("lasota_report.json");
    round_trips::<LasotaReport>(&path);
    let report: LasotaReport = automorph::io::from_json_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report.status, "converged_stable");
    assert!(report.oracle_sup_diff < 1e-4);
    assert!(report.gamma < report.gamma_star);
    assert!(read_csv(dir.path()).values().iter().all(|z| z.re > 0.0));
}

#[test]
fn lasota_gamma_above_threshold_exits_three() {
    let (o, dir) = run("lasota", "lasota_gamma_large");
    assert_eq!(code(&o), 3);
    assert_eq!(read_json(dir.path(), "lasota_report.json")["status"], "gamma_too_large");
}

#[test]
fn aa_test_reports_translation_numbers() {
    let (o, dir) = run("aa-test", "aa_test");
    assert_eq!(code(&o), 0);
    let path = dir.path().join("aa_test.json");
    round_trips::<AaTestOutput>(&path);
    let v = read_json(dir.path(), "aa_test.json");
    assert!(!v["recurrence"]["translation_numbers"].as_array().unwrap().is_empty());
    assert_eq!(v["antiderivative"]["bounded_verdict"], true);
}

#[test]
fn every_shipped_config_parses() {
    for entry in fs::read_dir(config("x").parent().unwrap()).unwrap() {
        let path = entry.unwrap().path();
        let cfg = automorph_cli::RunConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        cfg.validate().unwrap();
    }
}
