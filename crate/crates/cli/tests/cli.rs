//! End-to-end checks of the `acekit` binary: determinism of simulate
//! outputs, CLI/library agreement, and the error contract.

use std::path::Path;
use std::process::Command;

use acekit::harness::{run_estimator, EstimatorSpec, ScoreSpec};
use acekit::numkit::SeededRng;
use acekit::simgen::{scenario, Regime, Scenario};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_acekit"))
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut entries: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    entries.sort();
    entries
}

fn fixture_csv(dir: &Path, with_missing: bool) -> std::path::PathBuf {
    let bundle = scenario(Scenario::Fig10);
    let data = bundle
        .model
        .generate(60, Regime::Observational, &mut SeededRng::new(99, 0))
        .unwrap();
    let mut buf = Vec::new();
    data.write_csv(&mut buf).unwrap();
    let mut text = String::from_utf8(buf).unwrap();
    if with_missing {
        // Blank one covariate cell on the second data row (column x3).
        let lines: Vec<&str> = text.lines().collect();
        let mut row: Vec<String> = lines[2].split(',').map(String::from).collect();
        row[2] = String::new();
        let mut rebuilt: Vec<String> = lines.iter().map(|s| s.to_string()).collect();
        rebuilt[2] = row.join(",");
        text = rebuilt.join("\n");
        text.push('\n');
    }
    let path = dir.join("fixture.csv");
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn simulate_is_byte_identical_across_runs_and_worker_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let dirs = ["a", "b", "c"].map(|d| tmp.path().join(d));
    for (dir, workers) in dirs.iter().zip(["1", "1", "8"]) {
        let status = bin()
            .args([
                "simulate",
                "--scenario",
                "fig5",
                "--reps",
                "40",
                "--seed",
                "7",
                "--workers",
                workers,
                "--out",
            ])
            .arg(dir)
            .status()
            .unwrap();
        assert!(status.success());
    }
    let a = read_dir_sorted(&dirs[0]);
    assert_eq!(a.len(), 6);
    assert_eq!(a, read_dir_sorted(&dirs[1]), "same-seed reruns differ");
    assert_eq!(a, read_dir_sorted(&dirs[2]), "worker count changed output");
}

#[test]
fn estimate_matches_the_library_call() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = fixture_csv(tmp.path(), false);
    let output = bin()
        .args([
            "estimate",
            "--data",
            csv.to_str().unwrap(),
            "--treatment",
            "t",
            "--response",
            "y",
            "--covariates",
            "x1,x2,x3,x4",
            "--method",
            "ipw",
            "--ps",
            "logistic",
        ])
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
    let cli_estimate: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();

    let table = acekit::table::ingest_csv(
        &csv,
        "t",
        Some("y"),
        &["x1", "x2", "x3", "x4"].map(String::from),
    )
    .unwrap();
    let data = table.to_dataset().unwrap();
    let expected = run_estimator(
        &EstimatorSpec::Ipw {
            ps: ScoreSpec::LogisticPs,
        },
        &data,
        None,
    )
    .unwrap();

    let cli_value = cli_estimate["estimate"].as_f64().unwrap();
    assert!(
        (cli_value - expected.estimate).abs() < 1e-12,
        "{cli_value} vs {}",
        expected.estimate
    );
    assert_eq!(cli_estimate["method"], "ipw");
    assert!(cli_estimate["diagnostics"]["max_weight"].is_f64());
}

#[test]
fn asymptotics_prints_the_multipliers() {
    let output = bin()
        .args(["asymptotics", "--scenario", "fig5"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let v: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(v["m0"], 5.0);
    assert_eq!(v["m2"], 4.0);
    assert_eq!(v["m1"], 10.0);
    assert_eq!(v["m3"], 5.0);
}

#[test]
fn missing_file_gives_data_exit_code_and_json_error() {
    let output = bin()
        .args([
            "estimate",
            "--data",
            "/nonexistent/input.csv",
            "--treatment",
            "t",
            "--response",
            "y",
            "--covariates",
            "x1",
            "--method",
            "face",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3));
    let err: serde_json::Value = serde_json::from_slice(&output.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "data");
}

#[test]
fn unknown_scenario_is_a_usage_error() {
    let output = bin()
        .args(["simulate", "--scenario", "fig99", "--out", "/tmp/unused"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&output.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "usage");
}

#[test]
fn estimate_with_missing_cells_imputes_deterministically() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = fixture_csv(tmp.path(), true);
    let run = || {
        let output = bin()
            .args([
                "estimate",
                "--data",
                csv.to_str().unwrap(),
                "--treatment",
                "t",
                "--response",
                "y",
                "--covariates",
                "x1,x2,x3,x4",
                "--method",
                "aipw",
                "--ps",
                "logistic",
                "--m",
                "per-arm",
                "--impute-seed",
                "11",
            ])
            .output()
            .unwrap();
        assert!(output.status.success(), "{output:?}");
        output.stdout
    };
    assert_eq!(run(), run());
}

#[test]
fn ps_density_emits_the_grid() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = fixture_csv(tmp.path(), false);
    let output = bin()
        .args([
            "ps-density",
            "--data",
            csv.to_str().unwrap(),
            "--treatment",
            "t",
            "--covariates",
            "x1,x2,x3,x4",
            "--points",
            "101",
        ])
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
    let text = String::from_utf8(output.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "ps,treated,control");
    assert_eq!(lines.len(), 102);
    assert!(lines[1].starts_with("0,"));
    assert!(lines[101].starts_with("1,"));
}

#[test]
fn scenario_file_round_trips_through_simulate() {
    let tmp = tempfile::tempdir().unwrap();
    let bundle = scenario(Scenario::Fig10);
    let path = tmp.path().join("bundle.json");
    std::fs::write(&path, serde_json::to_string_pretty(&bundle).unwrap()).unwrap();
    let out = tmp.path().join("out");
    let status = bin()
        .args([
            "simulate",
            "--scenario-file",
            path.to_str().unwrap(),
            "--reps",
            "6",
            "--n",
            "150",
            "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["replicates"], 6);
    assert_eq!(summary["true_ace"], 0.5);
}
