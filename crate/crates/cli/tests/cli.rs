use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
        .canonicalize()
        .unwrap()
}

fn qeom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qeom")).args(args).output().unwrap()
}

fn write_config(dir: &Path, extra: &str) -> PathBuf {
    let path = dir.join("run.toml");
    let text = format!(
        "integrals_path = {:?}\noutput_path = \"out/results.csv\"\n{extra}\n",
        fixture("ethylene_cas22.fcidump")
    );
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn run_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "shot_counts = [2000, \"inf\"]\nrepetitions = 3");
    let out = qeom(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("out/results.csv")).unwrap();
    assert!(csv.starts_with("beta,shots,trace_distance_median"));
    // 13 β values for each of the two shot counts
    assert_eq!(csv.lines().count(), 1 + 2 * 13);
    assert!(dir.path().join("out/results.json").exists());
}

#[test]
fn census_reports_basis_and_qubits() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    let out = qeom(&["census", "--config", cfg.to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["basis_size"], 3);
    assert_eq!(report["n_qubits"], 4);
    assert_eq!(report["reference_count"], 100);
}

#[test]
fn sample_writes_outcome_record() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "shot_counts = [500]\nrng_seed = 5");
    let rec = dir.path().join("shots.csv");
    let out = qeom(&["sample", "--config", cfg.to_str().unwrap(), "--out", rec.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&rec).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# seed=5"));
    assert_eq!(lines.next(), Some("q0,q1,q2,q3"));
    assert_eq!(lines.count(), 500);
}

#[test]
fn invalid_config_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "repetitions = 0");
    let out = qeom(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("repetitions"));
}

#[test]
fn invalid_eta_override_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    let out = qeom(&["census", "--config", cfg.to_str().unwrap(), "--eta", "-1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unstable_run_exits_with_three() {
    // a threshold above every metric eigenvalue leaves nothing to solve
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "shot_counts = [1000]\nrepetitions = 2");
    let out = qeom(&["run", "--config", cfg.to_str().unwrap(), "--eta", "100"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("out/results.csv").exists());
}
