//! End-to-end checks of the command-line driver: exit codes, report
//! determinism, seed handling, and config validation.

use std::path::Path;
use std::process::{Command, Output};

use tempfile::tempdir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_pdo-lab"));
    c.env_remove("PDO_LAB_SEED");
    c
}

fn run_scenario(name: &str, out: &Path, envs: &[(&str, &str)]) -> Output {
    let mut c = bin();
    c.args(["run", "--scenario", name, "--out"]).arg(out).args(["--workers", "1"]);
    for (k, v) in envs {
        c.env(k, v);
    }
    c.output().expect("spawn pdo-lab")
}

#[test]
fn list_is_sorted_and_complete() {
    let out = bin().arg("list").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let names: Vec<&str> =
        text.lines().filter(|l| !l.starts_with(' ') && !l.is_empty()).collect();
    let mut sorted = names.clone();
    sorted.sort_unstable();
    assert_eq!(names, sorted, "scenario listing must be sorted");
    for required in [
        "boundedness-calibration",
        "composition-order",
        "index-invariance",
        "interpolation-suite",
        "mollify-convergence",
        "oscint-consistency",
        "parametrix-residual",
        "partition-check",
        "perturbation-openness",
        "quantization-anchors",
        "smoothing-split",
    ] {
        assert!(names.contains(&required), "missing {required} in listing");
    }
}

#[test]
fn unknown_scenario_is_a_config_error() {
    let dir = tempdir().unwrap();
    let out = run_scenario("no-such-scenario", dir.path(), &[]);
    assert_eq!(out.status.code(), Some(2), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn missing_selector_is_a_config_error() {
    let out = bin().args(["run"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn csv_reports_are_byte_identical_across_runs() {
    let dir_a = tempdir().unwrap();
    let dir_b = tempdir().unwrap();
    let a = run_scenario("partition-check", dir_a.path(), &[]);
    let b = run_scenario("partition-check", dir_b.path(), &[]);
    assert_eq!(a.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(b.status.code(), Some(0));
    let csv_a = std::fs::read(dir_a.path().join("partition-check.csv")).unwrap();
    let csv_b = std::fs::read(dir_b.path().join("partition-check.csv")).unwrap();
    assert!(!csv_a.is_empty());
    assert_eq!(csv_a, csv_b, "identical config + seed must give identical CSV bytes");
    assert!(dir_a.path().join("partition-check.json").exists());
}

#[test]
fn seed_env_override_is_recorded() {
    let dir = tempdir().unwrap();
    let out = run_scenario("partition-check", dir.path(), &[("PDO_LAB_SEED", "123")]);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("partition-check.json")).unwrap())
            .unwrap();
    assert_eq!(json["seed"], 123);
}

#[test]
fn garbage_seed_env_is_a_config_error() {
    let dir = tempdir().unwrap();
    let out = run_scenario("partition-check", dir.path(), &[("PDO_LAB_SEED", "not-a-number")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_drives_a_run_and_restated_tolerances_are_checked() {
    let dir = tempdir().unwrap();
    let good = dir.path().join("good.json");
    std::fs::write(
        &good,
        r#"{
            "scenario": "partition-check",
            "seed": 7,
            "grid": {"dim": 1, "box_radius": 16.0, "points": 256},
            "tolerances": {"partition_unity_deviation": 1e-10}
        }"#,
    )
    .unwrap();
    let out_dir = dir.path().join("reports");
    let mut c = bin();
    c.args(["run", "--config"]).arg(&good).arg("--out").arg(&out_dir);
    let out = c.output().unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(out_dir.join("partition-check.csv").exists());

    // A restated tolerance that disagrees with the built-in table is refused.
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{
            "scenario": "partition-check",
            "tolerances": {"partition_unity_deviation": 1e-9}
        }"#,
    )
    .unwrap();
    let mut c = bin();
    c.args(["run", "--config"]).arg(&bad);
    let out = c.output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("tolerance"), "diagnostic should name the problem: {err}");
}

#[test]
fn malformed_config_is_a_config_error() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{ not json").unwrap();
    let mut c = bin();
    c.args(["run", "--config"]).arg(&path);
    let out = c.output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
