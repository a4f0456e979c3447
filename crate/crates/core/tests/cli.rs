//! The `porlab` binary: outputs, exit codes and determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn porlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_porlab")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn config(name: &str) -> String {
    configs().join(name).to_str().unwrap().to_owned()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn sequence_writes_report_and_terms_csv() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("seq.json");
    let o = porlab(&["sequence", "--config", &config("toy.toml"), "--count", "200", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&out);
    assert_eq!(r["count"], 200);
    assert_eq!(r["status"], "pass");
    let terms: Vec<&str> = r["terms"].as_array().unwrap().iter().take(3).map(|t| t.as_str().unwrap()).collect();
    assert_eq!(terms, ["0.4", "0.37", "0.336"]);
    let csv = std::fs::read_to_string(dir.path().join("seq_terms.csv")).unwrap();
    assert_eq!(csv.lines().count(), 201);
    assert_eq!(csv.lines().nth(3), Some("3,0.336,3"));
}

#[test]
fn usage_and_config_errors_exit_one() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[f]\nfamily = \"linear\"\nc = \"1/2\"\n[g\n").unwrap();
    assert_eq!(code(&porlab(&["sequence", "--config", bad.to_str().unwrap()])), 1);
    assert_eq!(code(&porlab(&["sequence", "--config", "/nonexistent/run.toml"])), 1);
    assert_eq!(code(&porlab(&["frobnicate"])), 1);
    assert_eq!(code(&porlab(&["verify", "--config", &config("toy.toml"), "--n-range", "7..3"])), 1);
    assert_eq!(code(&porlab(&["verify", "--config", &config("coupled.toml")])), 1);
    assert_eq!(code(&porlab(&["--help"])), 0);
}

#[test]
fn toy_verify_passes_and_is_byte_identical() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for out in [&a, &b] {
        let o = porlab(&["verify", "--config", &config("toy.toml"), "--seed", "7", "--out", out.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(std::fs::read(dir.path().join("a_gaps.csv")).unwrap(), std::fs::read(dir.path().join("b_gaps.csv")).unwrap());
    let r = json(&a);
    assert_eq!(r["seed"], 7);
    assert_eq!(r["gaps"].as_array().unwrap().len(), 5);
    assert!(r["failures"].as_array().unwrap().is_empty());
}

#[test]
fn failed_certificates_exit_two() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("minc.toml");
    let text = std::fs::read_to_string(configs().join("toy.toml")).unwrap().replace("strategy = \"max-C\"", "strategy = \"min-C\"");
    std::fs::write(&cfg, text).unwrap();
    let out = dir.path().join("v.json");
    let o = porlab(&["verify", "--config", cfg.to_str().unwrap(), "--n-range", "3..5", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let r = json(&out);
    assert_eq!(r["status"], "falsified");
    assert!(r["failures"][0].as_str().unwrap().contains("digit criterion"));
}

#[test]
fn invalid_set_parameters_exit_two() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("n2.toml");
    let text = std::fs::read_to_string(configs().join("toy.toml")).unwrap().replacen("N = 3", "N = 2", 1);
    std::fs::write(&cfg, text).unwrap();
    let o = porlab(&["construct", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    let constraints = &r["set"]["validity"]["constraints"];
    assert!(constraints.as_array().unwrap().iter().any(|c| c["holds"] == false));
}

#[test]
fn precision_budget_trip_exits_three() {
    let o = Command::new(env!("CARGO_BIN_EXE_porlab"))
        .args(["sequence", "--config", &config("toy.toml"), "--count", "200"])
        .env("PORLAB_PRECISION_CAP", "20")
        .output()
        .unwrap();
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("term "));
}

#[test]
fn metrics_corpus_harness() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("m.json");
    let o = porlab(&["metrics", "--config", &config("metrics.toml"), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let t = &json(&out)["harness"]["table"];
    assert_eq!((t["agree"].as_u64(), t["violations"].as_u64(), t["vacuous"].as_u64()), (Some(2), Some(0), Some(2)));
    assert!(dir.path().join("m_ratios.csv").exists());
}
