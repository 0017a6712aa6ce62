use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use pqt::harness::{parse_config, PROTOCOLS};

fn pqt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pqt")).args(args).output().expect("binary runs")
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn config(name: &str) -> String {
    configs().join(format!("{name}.json")).display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn every_protocol_has_a_documented_config() {
    let mut seen: Vec<String> = std::fs::read_dir(configs())
        .unwrap()
        .map(|e| {
            let text = std::fs::read_to_string(e.unwrap().path()).unwrap();
            parse_config(&text).unwrap().protocol
        })
        .collect();
    seen.sort();
    let ids: Vec<&str> = PROTOCOLS.iter().map(|p| p.0).collect();
    assert_eq!(seen, ids);
}

#[test]
fn list_protocols_prints_every_id() {
    let o = pqt(&["list-protocols"]);
    assert!(o.status.success());
    let out = stdout(&o);
    for (id, _) in PROTOCOLS {
        assert!(out.lines().any(|l| l.starts_with(id)), "{id} missing");
    }
}

#[test]
fn validate_accepts_documented_configs() {
    for (id, _) in PROTOCOLS {
        let o = pqt(&["validate", "--config", &config(id)]);
        assert_eq!(o.status.code(), Some(0), "{id}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn validation_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"name":"x","protocol":"repeatability","initial_state":"plus","observables":["pauli:Q"],"trials":5}"#)
        .unwrap();
    let o = pqt(&["validate", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("observables[0]"));
    let o = pqt(&["run", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let o = pqt(&["run", "--config", dir.path().join("absent.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let o = pqt(&["run", "--config", &config("repeatability"), "--mode", "sideways"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn runtime_errors_exit_two() {
    let o = pqt(&["run", "--config", &config("reconstruct"), "--mode", "quantum"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("passive mode"));
}

#[test]
fn flags_override_config() {
    let o = pqt(&["run", "--config", &config("repeatability"), "--seed", "7", "--mode", "quantum"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["seed"], 7);
    assert_eq!(v["mode"], "quantum");
    assert_eq!(v["metrics"]["agreement_rate"]["value"], 1.0);
}

#[test]
fn out_file_matches_stdout_and_reruns_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let a = pqt(&["run", "--config", &config("chsh"), "--out", out.to_str().unwrap()]);
    assert!(a.status.success());
    assert!(a.stdout.is_empty());
    let b = pqt(&["run", "--config", &config("chsh")]);
    assert_eq!(std::fs::read(&out).unwrap(), b.stdout);
}

#[test]
fn csv_format() {
    let o = pqt(&["run", "--config", &config("born-sampling"), "--format", "csv"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let mut rows = csv::Reader::from_reader(out.as_bytes());
    assert_eq!(rows.headers().unwrap(), vec!["table", "row", "column", "value"]);
    assert_eq!(rows.records().count(), 2 * 4);
}

#[test]
fn timing_is_opt_in() {
    let o = pqt(&["run", "--config", &config("signalling"), "--timing"]);
    assert!(stdout(&o).contains("wall_clock_ms"));
    let o = pqt(&["run", "--config", &config("signalling")]);
    assert!(!stdout(&o).contains("wall_clock_ms"));
}
