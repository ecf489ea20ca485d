//! End-to-end tests of the `eqobs` binary.

use std::path::Path;
use std::process::{Command, Output};

fn eqobs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eqobs"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn short_config(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("scenario.json");
    std::fs::write(
        &path,
        r#"{
            "group": "se2",
            "dt": 0.001,
            "duration": 0.2,
            "gains": { "k1": 1.0, "k2": 1.0 },
            "origin": { "P0": [1,0,0,0,1,0,0,0,1], "V0": [0,0,0] },
            "true_init": { "P": [1,0,0,0,1,0,0,0,1], "V": [1,1,2] },
            "observer_init": { "Ahat": [1,0,0,0,1,0,0,0,1], "ahat": [0,0,0] },
            "input_source": "hovercraft_lissajous"
        }"#,
    )
    .unwrap();
    path
}

#[test]
fn run_writes_all_artifacts_and_a_summary() {
    let dir = tempfile::tempdir().unwrap();
    let config = short_config(dir.path());
    let out_dir = dir.path().join("out");

    let output = eqobs(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );

    for name in [
        "trajectory.csv",
        "trajectory.svg",
        "lyapunov.svg",
        "summary.json",
    ] {
        assert!(out_dir.join(name).is_file(), "missing {name}");
    }

    let summary: serde_json::Value =
        serde_json::from_slice(&output.stdout).expect("summary on stdout");
    assert_eq!(summary["group"], "se2");
    assert_eq!(summary["integrator"], "euler");
    assert!(summary["lyapunov_initial"].as_f64().unwrap() > 0.0);
}

#[test]
fn integrator_flag_overrides_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = short_config(dir.path());
    let out_dir = dir.path().join("out");

    let output = eqobs(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--integrator",
        "exp",
    ]);
    assert!(output.status.success());

    let summary: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out_dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["integrator"], "exp");
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let config = short_config(dir.path());
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");

    for out in [&out_a, &out_b] {
        let output = eqobs(&[
            "run",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(output.status.success());
    }

    let csv_a = std::fs::read(out_a.join("trajectory.csv")).unwrap();
    let csv_b = std::fs::read(out_b.join("trajectory.csv")).unwrap();
    assert_eq!(csv_a, csv_b);
}

#[test]
fn verify_passes_on_builtin_groups() {
    let output = eqobs(&["verify", "--group", "so3", "--cases", "50", "--seed", "7"]);
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("overall: PASS"), "stdout: {stdout}");
    assert!(stdout.contains("lift_condition"));
}

#[test]
fn verify_rejects_an_unknown_group() {
    let output = eqobs(&["verify", "--group", "nope", "--cases", "5", "--seed", "1"]);
    assert!(!output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("unknown group"), "stderr: {stderr}");
}

#[test]
fn missing_config_file_is_a_clean_error() {
    let output = eqobs(&["run", "--config", "/no/such/file.json", "--out", "/tmp/x"]);
    assert!(!output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("file.json"), "stderr: {stderr}");
}

#[test]
fn sweep_runs_every_gain_pair() {
    let dir = tempfile::tempdir().unwrap();
    let config = short_config(dir.path());
    let out_dir = dir.path().join("sweep");

    let output = eqobs(&[
        "sweep",
        "--config",
        config.to_str().unwrap(),
        "--k1",
        "0.5,1.0",
        "--k2",
        "2.0",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );

    let entries: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out_dir.join("sweep_summary.json")).unwrap())
            .unwrap();
    let entries = entries.as_array().unwrap();
    assert_eq!(entries.len(), 2);
    assert_eq!(entries[0]["k1"], 0.5);
    assert_eq!(entries[1]["k1"], 1.0);
    for entry in entries {
        let sub = out_dir.join(entry["dir"].as_str().unwrap());
        assert!(sub.join("trajectory.csv").is_file());
        assert!(sub.join("summary.json").is_file());
        assert_eq!(entry["config_hash"].as_str().unwrap().len(), 16);
    }
}

#[test]
fn sweep_rejects_bad_gain_lists() {
    let dir = tempfile::tempdir().unwrap();
    let config = short_config(dir.path());
    let output = eqobs(&[
        "sweep",
        "--config",
        config.to_str().unwrap(),
        "--k1",
        "abc",
        "--k2",
        "1.0",
        "--out",
        dir.path().join("s").to_str().unwrap(),
    ]);
    assert!(!output.status.success());
    assert!(String::from_utf8_lossy(&output.stderr).contains("invalid k1"));
}
