use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const TABLE: &str = include_str!("../../core/fixtures/table.txt");

fn ccodes(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ccodes"))
        .args(args)
        .env("CCODES_OUT_DIR", dir)
        .output()
        .expect("binary runs")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn verify_table_passes_on_bundled_fixture() {
    let dir = TempDir::new().unwrap();
    let o = ccodes(dir.path(), &["verify", "table", "--phi", "0,0.449,1.571,3.1416"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let r = read_json(&dir.path().join("verify_table.json"));
    assert_eq!(r["schema"], 1);
    assert_eq!(r["tolerance"], 1e-10);
    assert_eq!(r["rows"].as_array().unwrap().len(), 64);
    assert_eq!(r["pass"], true);
}

#[test]
fn corrupted_fixture_row_is_named() {
    let dir = TempDir::new().unwrap();
    let bad = TABLE.replacen(
        "corrected +0.5 XII +0.5 XIZ cos -0.5 XIY sin",
        "corrected +0.5 XII +0.5 XIZ cos +0.5 XIY sin",
        1,
    );
    assert_ne!(bad, TABLE);
    let path = dir.path().join("bad.txt");
    std::fs::write(&path, bad).unwrap();
    let o = ccodes(dir.path(), &["verify", "table", "--fixture", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("failing row: XI"), "{out}");
    assert!(!out.contains("failing row: YI"));
    let r = read_json(&dir.path().join("verify_table.json"));
    assert_eq!(r["failing_rows"], serde_json::json!(["XI"]));
}

#[test]
fn missing_fixture_exits_two() {
    let dir = TempDir::new().unwrap();
    let o = ccodes(dir.path(), &["verify", "table", "--fixture", "/nonexistent/table.txt"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!dir.path().join("verify_table.json").exists());
    let o = ccodes(dir.path(), &["experiment", "sx1", "--system", "/nonexistent/alanine.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_codes_with_random_ancillae() {
    let dir = TempDir::new().unwrap();
    let o = ccodes(dir.path(), &["verify", "codes", "--code", "fig3", "--random-ancilla", "20"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let r = read_json(&dir.path().join("verify_codes.json"));
    assert_eq!(r["codes"][0]["random_ancilla"]["trials"], 20);
    assert!(r["recovery_tolerance"].is_number());
}

#[test]
fn reports_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let run = |name: &str| {
        let o = ccodes(dir.path(), &["verify", "codes", "--seed", "9", "--out", name]);
        assert_eq!(o.status.code(), Some(0));
        std::fs::read(dir.path().join(name)).unwrap()
    };
    assert_eq!(run("a.json"), run("b.json"));
}

#[test]
fn verify_pulses_passes() {
    let dir = TempDir::new().unwrap();
    let o = ccodes(dir.path(), &["verify", "pulses", "--random-systems", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let r = read_json(&dir.path().join("verify_pulses.json"));
    assert_eq!(r["pulse_gate"]["inputs"], 16);
}

#[test]
fn capacity_examples() {
    let dir = TempDir::new().unwrap();
    let cap = |args: &[&str]| {
        let mut a = vec!["capacity"];
        a.extend_from_slice(args);
        a.extend_from_slice(&["--out", "cap.json"]);
        assert_eq!(ccodes(dir.path(), &a).status.code(), Some(0));
        read_json(&dir.path().join("cap.json"))
    };
    let r = cap(&["2", "1"]);
    assert_eq!((r["min_ancillae"].as_u64(), r["error_count"].as_u64()), (Some(4), Some(16)));
    assert_eq!(cap(&["1", "99", "--nspins", "5"])["error_count"], 16);
    assert_eq!(cap(&["2", "2"])["min_ancillae"], 8);
    assert_eq!(ccodes(dir.path(), &["capacity", "0", "1"]).status.code(), Some(2));
}

#[test]
fn code_build_emits_one_based_record() {
    let dir = TempDir::new().unwrap();
    let o = ccodes(dir.path(), &["code", "build", "fig1", "--emit", "circuit.json"]);
    assert_eq!(o.status.code(), Some(0));
    let r = read_json(&dir.path().join("circuit.json"));
    assert_eq!(r["schema"], 1);
    assert_eq!(r["data_spins"], serde_json::json!([1, 2]));
    assert_eq!(r["ancilla_spins"], serde_json::json!([3]));
    assert_eq!(ccodes(dir.path(), &["code", "build", "fig2", "--emit", "x.json"]).status.code(), Some(2));
}

fn peaks(dir: &Path, prefix: &str) -> Value {
    read_json(&dir.join(format!("{prefix}_peaks.json")))
}

#[test]
fn experiment_outputs() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();

    assert_eq!(ccodes(d, &["experiment", "sx1", "--uncorrected"]).status.code(), Some(0));
    let p = peaks(d, "sx1_uncorrected");
    let list = p["peaks"].as_array().unwrap();
    assert!(list.iter().any(|q| (q["omega1_hz"].as_f64().unwrap() - 27.1).abs() < 1.0));
    assert!(list.iter().any(|q| (q["omega1_hz"].as_f64().unwrap() + 27.1).abs() < 1.0));
    for suffix in ["spectrum.csv", "slice.csv"] {
        assert!(d.join(format!("sx1_uncorrected_{suffix}")).is_file());
    }
    let csv = std::fs::read_to_string(d.join("sx1_uncorrected_spectrum.csv")).unwrap();
    assert!(csv.starts_with("omega1_hz,"));
    assert_eq!(csv.lines().count(), 1 + 128);

    assert_eq!(ccodes(d, &["experiment", "sx1", "--corrected"]).status.code(), Some(0));
    let p = peaks(d, "sx1_corrected");
    let main = p["peaks"][0]["amplitude"].as_f64().unwrap();
    for q in p["peaks"].as_array().unwrap() {
        if q["omega1_hz"].as_f64().unwrap().abs() > 10.0 {
            assert!(q["amplitude"].as_f64().unwrap() < 0.01 * main);
        }
    }
    assert_eq!(p["summary"]["zero_slice_phase"], "in_phase");

    assert_eq!(ccodes(d, &["experiment", "sx1sz2", "--corrected"]).status.code(), Some(0));
    assert_eq!(peaks(d, "sx1sz2_corrected")["summary"]["zero_slice_phase"], "antiphase");
    let slice = std::fs::read_to_string(d.join("sx1sz2_corrected_slice.csv")).unwrap();
    assert!(slice.starts_with("omega2_hz,re,im"));
}
