use std::path::Path;
use std::process::{Command, Output};

fn lab(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dirac-lab"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn error_json(o: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&o.stderr);
    let line = text.lines().find(|l| l.starts_with('{')).expect("error JSON on stderr");
    serde_json::from_str(line).unwrap()
}

fn report(dir: &Path) -> serde_json::Value {
    serde_json::from_slice(&std::fs::read(dir.join("report.json")).unwrap()).unwrap()
}

#[test]
fn verify_suite_is_green() {
    let dir = tempfile::tempdir().unwrap();
    let o = lab(&["verify", "--seed", "3"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let r = report(dir.path());
    let checks = r["checks"].as_array().unwrap();
    assert!(checks.len() >= 10);
    assert!(checks.iter().all(|c| c["passed"] == true));
    assert_eq!(r["manifest"]["config"]["seed"], 3);
}

#[test]
fn zero_data_evolves_to_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = lab(&["evolve", "--set", "amplitude=0", "--set", "nonlinearity=F1", "--set", "cells=128"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let r = report(dir.path());
    assert_eq!(r["metrics"]["charge_drift"], 0.0);
    let csv = std::fs::read_to_string(dir.path().join("final_state.csv")).unwrap();
    assert!(csv.lines().skip(1).all(|l| l.split(',').skip(1).all(|v| v == "0")));
    for f in ["trajectory.csv", "initial_state.json", "report.json"] {
        assert!(r["files"].as_array().unwrap().iter().any(|x| x == f), "{f}");
    }
}

#[test]
fn nonlinear_higher_channel_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = lab(&["evolve", "--set", "two_j=3", "--set", "kappa=2", "--set", "nonlinearity=F2"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let e = error_json(&o);
    assert_eq!(e["error"], "config");
    assert!(e["message"].as_str().unwrap().contains("unsupported index"));
    assert!(!dir.path().join("report.json").exists());
}

#[test]
fn failure_paths_emit_json() {
    let dir = tempfile::tempdir().unwrap();
    let bad_flag = lab(&["evolve", "--frobnicate"], dir.path());
    assert_eq!(bad_flag.status.code(), Some(2));
    assert_eq!(error_json(&bad_flag)["exit_code"], 2);

    let missing = lab(&["verify", "--config", "/nonexistent/run.toml"], dir.path());
    assert_eq!(missing.status.code(), Some(2));

    let coarse = lab(&["evolve", "--set", "cells=32"], dir.path());
    assert_eq!(coarse.status.code(), Some(2));

    // the smoothing ratio is not dilation invariant, so the scaling sweep
    // reports a failed check
    let scaling = lab(&["sweep-scaling", "--set", "cells=256", "--set", "radius=20"], dir.path());
    assert_eq!(scaling.status.code(), Some(3));
    assert_eq!(error_json(&scaling)["error"], "check");
}

#[test]
fn config_file_and_flags_combine() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "nonlinearity = \"F1\"\ncells = 128\nradius = 12\namplitudes = [0.0]\n").unwrap();
    let out = dir.path().join("out");
    let o = lab(&["sweep-amplitude", "--config", cfg.to_str().unwrap(), "--threads", "2"], &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("amplitude_sweep.csv")).unwrap();
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    // zero amplitude: bounded trivially, Picard converges at once
    assert_eq!(row[0], "0");
    assert_eq!(row[5], "1");
    assert_eq!(report(&out)["manifest"]["config"]["threads"], 2);
}

#[test]
fn duplicate_dilations_give_identical_ratios() {
    let dir = tempfile::tempdir().unwrap();
    lab(&["sweep-scaling", "--set", "cells=128", "--set", "radius=12", "--set", "lambdas=[1.0, 1.0]"], dir.path());
    let csv = std::fs::read_to_string(dir.path().join("endpoint_ratios.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0], rows[1]);
}
