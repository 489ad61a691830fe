//! The `aptsim` binary: exit codes, files written and count-file input.

use std::path::Path;
use std::process::{Command, Output};

use aptsim::io::{counts_csv, MleJson};
use aptsim_core::dynamics::DensityMatrix;
use aptsim_core::tomography::{fidelity, noiseless_counts};

fn aptsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aptsim")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn figure_writes_one_file_per_curve() {
    let dir = tempfile::tempdir().unwrap();
    let out = aptsim(&["figure", "--figure", "4b", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["fig4b_0.8_0.8.csv", "fig4b_0.8_1.csv", "fig4b_0.8_2.csv"] {
        let text = std::fs::read_to_string(dir.path().join(name)).unwrap();
        assert!(text.starts_with("t,concurrence,norm\n0.00000,1.00000,1.00000\n"));
        assert_eq!(text.lines().count(), 1 + 1001);
        assert!(stdout(&out).contains(name));
    }
}

#[test]
fn validation_errors_exit_2() {
    for args in [
        &["figure", "--a1", "0", "--t-max", "1"][..],
        &["tomography", "--total", "0"],
        &["figure", "--figure", "2a", "--a2", "1.3"],
        &["figure", "--figure", "9z"],
        &["launch"],
    ] {
        let out = aptsim(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn numerical_failures_exit_3() {
    // a = 0.01 grows like cosh(t); by t = 800 the norm overflows.
    let out = aptsim(&["figure", "--a1", "0.01", "--t-max", "800", "--dt", "100"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn missing_count_file_is_an_io_error() {
    let out = aptsim(&["tomography", "--counts", "/nonexistent/counts.csv"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/counts.csv"));
}

#[test]
fn reconstructs_from_a_count_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("counts.csv");
    let bell = DensityMatrix::bell();
    std::fs::write(&path, counts_csv(&noiseless_counts(&bell, 10_000).unwrap())).unwrap();

    let out = aptsim(&["tomography", "--counts", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let parsed: MleJson = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(parsed.rho.len(), 16);
    assert!(parsed.iterations > 0);
    assert!(fidelity(&parsed.density_matrix().unwrap(), &bell) > 0.999);
}

#[test]
fn document_commands_write_to_out_or_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.csv");
    let out = aptsim(&["decompose", "--a1", "1.2", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let file = std::fs::read_to_string(&path).unwrap();
    let printed = stdout(&aptsim(&["decompose", "--a1", "1.2"]));
    assert_eq!(file, printed);
    assert_eq!(file.lines().count(), 6);
    assert!(Path::new(&path).exists());
}

#[test]
fn seeded_tomography_report() {
    let out = aptsim(&["tomography", "--seed", "42", "--total", "10000"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let points = v["points"].as_array().unwrap();
    assert_eq!(points.len(), 10);
    for p in points {
        let dc = p["concurrence_mle"].as_f64().unwrap() - p["concurrence_theory"].as_f64().unwrap();
        assert!(dc.abs() < 0.03, "{p}");
    }
}
