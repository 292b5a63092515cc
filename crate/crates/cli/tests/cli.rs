//! Contract tests for the command-line surface: exit codes, file formats,
//! validation messages, config-file merging.

use std::path::Path;
use std::process::{Command, Output};

use qreduce::integrator::{integrate, IntegratorConfig, Law};
use qreduce::model::{ModelParams, StateVector};

const PI: f64 = std::f64::consts::PI;

fn qreduce_bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qreduce"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn read_rows(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines
        .next()
        .unwrap()
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn trajectory_missing_x0_exits_1_naming_the_field() {
    let out = qreduce_bin(&["trajectory", "--theta0", "0,3.14", "--out", "/tmp/unused.csv"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("x0"), "stderr: {}", stderr_of(&out));
}

#[test]
fn trajectory_requires_exactly_one_phase_source() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("t.csv");
    let both = qreduce_bin(&[
        "trajectory",
        "--x0",
        "0.5,0.5",
        "--theta0",
        "0,1",
        "--seed",
        "1",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(both.status.code(), Some(1));
    let neither = qreduce_bin(&[
        "trajectory",
        "--x0",
        "0.5,0.5",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(neither.status.code(), Some(1));
}

#[test]
fn trajectory_csv_reparses_to_the_library_values_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("traj.csv");
    let out = qreduce_bin(&[
        "trajectory",
        "--x0",
        "0.3,0.7",
        "--theta0",
        &format!("0,{PI}"),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("outcome: collapse_to_0"));
    assert!(stdout.contains("collapse_time:"));

    // Same run through the library; every parsed CSV number must round-trip
    // to the in-memory value bit for bit.
    let initial = StateVector::new(vec![0.3, 0.7], vec![0.0, PI]).unwrap();
    let params = ModelParams::with_states(2);
    let cfg = IntegratorConfig::default();
    let traj = integrate(Law::Reduction, &initial, &params, &cfg).unwrap();

    let (header, rows) = read_rows(&out_path);
    assert_eq!(header, ["t", "x_1", "x_2", "theta_1", "theta_2", "q", "norm"]);
    assert_eq!(rows.len(), traj.times.len());
    let q = traj.q_series.as_ref().unwrap();
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row[0], traj.times[i]);
        assert_eq!(row[1], traj.states[i].x[0]);
        assert_eq!(row[2], traj.states[i].x[1]);
        assert_eq!(row[3], traj.states[i].theta[0]);
        assert_eq!(row[4], traj.states[i].theta[1]);
        assert_eq!(row[5], q[i]);
        assert_eq!(row[6], traj.norm_series[i]);
    }
}

#[test]
fn trajectory_full_law_free_evolution_keeps_x_constant() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("free.csv");
    let out = qreduce_bin(&[
        "trajectory",
        "--law",
        "full",
        "--x0",
        "0.5,0.5",
        "--theta0",
        "0,1",
        "--omega",
        "1,2",
        "--t-max",
        "2",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let (_, rows) = read_rows(&out_path);
    for row in &rows {
        assert!((row[1] - 0.5).abs() < 1e-12);
        assert!((row[2] - 0.5).abs() < 1e-12);
    }
}

#[test]
fn trajectory_unstable_step_exits_2() {
    let out = qreduce_bin(&[
        "trajectory",
        "--x0",
        "0.5,0.5",
        "--theta0",
        &format!("0,{PI}"),
        "--dt",
        "10",
        "--t-max",
        "100",
        "--out",
        "/tmp/unstable.csv",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("overflow"));
}

#[test]
fn ensemble_zero_runs_exits_1() {
    let out = qreduce_bin(&[
        "ensemble",
        "--x0",
        "0.5,0.5",
        "--runs",
        "0",
        "--out",
        "/tmp/unused.json",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("runs"));
}

#[test]
fn ensemble_rejects_explicit_phases() {
    let out = qreduce_bin(&[
        "ensemble",
        "--x0",
        "0.5,0.5",
        "--theta0",
        "0,1",
        "--runs",
        "10",
        "--out",
        "/tmp/unused.json",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("theta0"));
}

#[test]
fn ensemble_common_mode_reports_zero_collapses() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("common.json");
    let out = qreduce_bin(&[
        "ensemble",
        "--x0",
        "0.5,0.5",
        "--phase-mode",
        "common",
        "--runs",
        "500",
        "--seed",
        "9",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(report["counts"]["collapse_to_0"], 0);
    assert_eq!(report["counts"]["collapse_to_1"], 0);
    assert_eq!(report["oracle"]["all_decay"], 0.5);
    assert_eq!(report["seed"], 9);
    assert_eq!(report["params"]["phase_mode"], "common");
}

#[test]
fn sweep_scales_inversely_with_g_and_matches_analytic() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("sweep.csv");
    let out = qreduce_bin(&[
        "sweep",
        "--x0",
        "0.5,0.5",
        "--g-grid",
        "1,2",
        "--epsilon-grid",
        "0.001",
        "--runs",
        "64",
        "--seed",
        "5",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = read_rows(&out_path);
    assert_eq!(header, ["g", "epsilon", "tau_mean", "tau_analytic"]);
    assert_eq!(rows.len(), 2);
    // Doubling g halves the analytic reduction time.
    assert!((rows[0][3] / rows[1][3] - 2.0).abs() < 1e-12);
    // Measured means track the analytic value within the detection window.
    for row in &rows {
        let dt = 1e-3 / row[0];
        assert!((row[2] - row[3]).abs() <= 2.0 * dt, "row {row:?}");
    }
}

#[test]
fn sweep_empty_grid_exits_1() {
    let out = qreduce_bin(&[
        "sweep",
        "--x0",
        "0.5,0.5",
        "--epsilon-grid",
        "0.001",
        "--out",
        "/tmp/unused.csv",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("grid"));
}

#[test]
fn config_file_supplies_values_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("run.json");
    let file_out = dir.path().join("from_file.csv");
    let flag_out = dir.path().join("from_flag.csv");
    std::fs::write(
        &config_path,
        serde_json::json!({
            "x0": [0.5, 0.5],
            "theta0": [0.0, PI],
            "epsilon": 1e-4,
            "out": file_out,
        })
        .to_string(),
    )
    .unwrap();

    let out = qreduce_bin(&["trajectory", "--config", config_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(file_out.exists());

    // The --out flag wins over the file's value.
    let out = qreduce_bin(&[
        "trajectory",
        "--config",
        config_path.to_str().unwrap(),
        "--out",
        flag_out.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(flag_out.exists());

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"x0\": [0.5, 0.5], \"unknown_field\": 1}").unwrap();
    let out = qreduce_bin(&["trajectory", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_exits_0_and_lists_named_checks() {
    let out = qreduce_bin(&["verify"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    let pass_lines = stdout.lines().filter(|l| l.starts_with("[PASS]")).count();
    assert!(pass_lines >= 6, "only {pass_lines} checks listed");
    assert!(stdout.contains("expected mismatch"));
    assert!(!stdout.contains("[FAIL]"));
}

#[test]
fn unknown_flag_exits_1() {
    let out = qreduce_bin(&["trajectory", "--definitely-not-a-flag"]);
    assert_eq!(out.status.code(), Some(1));
}
