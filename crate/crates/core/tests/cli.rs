use serde_json::Value;
use std::process::{Command, Output};

fn dsosc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dsosc")).args(args).output().unwrap()
}

fn records(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

fn tmp(name: &str) -> std::path::PathBuf {
    std::env::temp_dir().join(format!("dsosc-{}-{name}", std::process::id()))
}

#[test]
fn verify_algebra_passes_and_reports_every_check() {
    let out = dsosc(&["verify-algebra", "--N", "4", "--n", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let recs = records(&out);
    let checks: Vec<_> = recs.iter().filter(|r| r["record"] == "check").collect();
    assert!(checks.len() > 10);
    assert!(checks.iter().all(|r| r["passed"] == true && r["anchor"].is_string()));
    assert!(checks.iter().any(|r| r["anchor"] == "q3.casimir"));
    assert!(recs.iter().all(|r| r.get("wall_time_ms").is_none()));
}

#[test]
fn sampled_runs_are_reproducible() {
    let args = ["verify-poisson", "--N", "3", "--n", "1", "--mode", "sampled", "--seed", "17"];
    let (a, b) = (dsosc(&args), dsosc(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn invalid_configuration_exits_with_two() {
    for args in [
        vec!["verify-algebra", "--N", "4", "--n", "0"],
        vec!["spectrum", "--N", "3", "--n", "3"],
        vec!["spectrum", "--c1", "-1"],
        vec!["spectrum", "--c1", "one half"],
        vec!["radial", "--component", "3"],
        vec!["levels", "--N", "4", "--n", "2", "--e-cut", "0.5"],
    ] {
        let out = dsosc(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn config_file_is_overridden_by_flags() {
    let path = tmp("cfg");
    std::fs::write(&path, "# partition\nN = 5\nn = 2\nc1 = 1/2\np_max = 0\n").unwrap();
    let cfg = path.to_str().unwrap();
    let base = records(&dsosc(&["spectrum", "--config", cfg]));
    assert!(base.iter().all(|r| r["N"] == 5 && r["c1"] == "1/2"));
    let over = records(&dsosc(&["spectrum", "--config", cfg, "--c1", "0.25"]));
    assert!(over.iter().all(|r| r["N"] == 5 && r["c1"] == "1/4"));

    std::fs::write(&path, "colour = blue\n").unwrap();
    assert_eq!(dsosc(&["spectrum", "--config", cfg]).status.code(), Some(2));
    std::fs::remove_file(&path).ok();
}

#[test]
fn spectrum_csv_has_a_header_and_rows() {
    let out = dsosc(&["spectrum", "--p-max", "1", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers().unwrap().clone();
    assert!(headers.iter().any(|h| h == "E"));
    assert!(headers.iter().any(|h| h == "admissible"));
    assert_eq!(reader.records().count(), 2 * 3 * 4);
}

#[test]
fn levels_table_counts_oscillator_states() {
    let out = dsosc(&["levels", "--N", "4", "--n", "2", "--e-cut", "5", "--format", "csv", "--count-check", "--l-max", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let idx = |name: &str, h: &csv::StringRecord| h.iter().position(|x| x == name).unwrap();
    let h = reader.headers().unwrap().clone();
    let (e, g) = (idx("E_over_hbar_omega", &h), idx("degeneracy", &h));
    let mut seen = std::collections::BTreeMap::new();
    for row in reader.records() {
        let row = row.unwrap();
        seen.insert(row[e].to_string(), row[g].parse::<u64>().unwrap());
    }
    let degs: Vec<u64> = seen.values().copied().collect();
    assert_eq!(degs, vec![1, 4, 10, 20]);
}

#[test]
fn radial_agreement_and_output_file() {
    let path = tmp("radial.jsonl");
    let out = dsosc(&[
        "radial", "--N", "5", "--n", "3", "--component", "1", "--l", "1", "--c1", "3/4", "--count", "3", "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let modes: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(modes.len(), 3);
    for (k, m) in modes.iter().enumerate() {
        assert!(m["rel_diff"].as_f64().unwrap() < 1e-6);
        assert_eq!(m["sign_changes"], k);
    }
    std::fs::remove_file(&path).ok();
}

#[test]
fn wavefunction_reports_a_unit_norm() {
    let out = dsosc(&["wavefunction", "--component", "2", "--nr", "2", "--l", "1", "--samples", "50"]);
    assert_eq!(out.status.code(), Some(0));
    let recs = records(&out);
    assert_eq!(recs.iter().filter(|r| r["record"] == "sample").count(), 50);
    let norm = recs.iter().find(|r| r["anchor"] == "radial.normalization").unwrap();
    assert!(norm["passed"] == true);
}

#[test]
fn timings_only_on_request() {
    let out = dsosc(&["verify-poisson", "--N", "3", "--n", "1", "--timings"]);
    assert!(records(&out).iter().any(|r| r.get("wall_time_ms").is_some()));
}
