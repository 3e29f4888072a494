use std::path::{Path, PathBuf};
use std::process::Command;

use bvfix::catalog;
use bvfix_cli::{run, Outcome, EXIT_MATH, EXIT_OK, EXIT_OPERATIONAL};
use tempfile::TempDir;

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn bvfix(args: &[&str]) -> Outcome {
    let mut full = vec!["bvfix"];
    full.extend_from_slice(args);
    run(full, None)
}

const METRIC: &str = r#"{"space": {"points": [0, 1, 3, 7], "d": [[0,1,3,7],[1,0,2,6],[3,2,0,4],[7,6,4,0]], "v": 1, "s": 1}}"#;
const SQUARED: &str = r#"{"space": {"points": [0, 1, 2], "d": [[0,1,4],[1,0,1],[4,1,0]], "v": 1, "s": 1}}"#;
const HALF: &str = r#"{"space": {"v": 1, "s": 1, "complete": true}, "domain": {"lo": -1, "hi": 1, "sampler_n": 201}, "map": {"expr": "x/2"}}"#;
const IDENTITY: &str = r#"{"space": {"points": ["a","b","c"], "d": [[0,1,2],[1,0,1],[2,1,0]], "v": 1, "s": 1, "complete": true}, "map": {"table": [0,1,2]}}"#;

#[test]
fn verify_metric_passes() {
    let dir = TempDir::new().unwrap();
    let p = write(dir.path(), "metric.json", METRIC);
    let out = bvfix(&["verify", "--instance", p.to_str().unwrap()]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    assert!(out.stdout.contains("PASS"));
}

#[test]
fn verify_squared_difference_fails_with_witness() {
    let dir = TempDir::new().unwrap();
    let p = write(dir.path(), "sq.json", SQUARED);
    let out = bvfix(&["verify", "--instance", p.to_str().unwrap()]);
    assert_eq!(out.code, EXIT_MATH);
    assert!(out.stdout.contains("(0,2,1): 4 > 2"), "{}", out.stdout);
    let out = bvfix(&["verify", "--instance", p.to_str().unwrap(), "--s", "2"]);
    assert_eq!(out.code, EXIT_OK);
}

#[test]
fn operational_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let out = bvfix(&["verify", "--instance", "/nonexistent/instance.json"]);
    assert_eq!(out.code, EXIT_OPERATIONAL);
    assert!(out.stderr.starts_with("error:"));

    let bad = write(dir.path(), "bad.json", "{\"space\": ");
    assert_eq!(bvfix(&["verify", "--instance", bad.to_str().unwrap()]).code, EXIT_OPERATIONAL);

    let half = write(dir.path(), "half.json", HALF);
    let h = half.to_str().unwrap();
    let out = bvfix(&["analyze", "--instance", h, "--phi", "t +* 2"]);
    assert_eq!(out.code, EXIT_OPERATIONAL);
    assert!(out.stderr.contains("--phi"));
    assert_eq!(bvfix(&["verify", "--instance", h, "--format", "csv"]).code, EXIT_OPERATIONAL);
    assert_eq!(bvfix(&["verify", "--instance", h, "--s", "0.5"]).code, EXIT_OPERATIONAL);

    let metric = write(dir.path(), "metric.json", METRIC);
    let out = bvfix(&["solve", "--instance", metric.to_str().unwrap()]);
    assert_eq!(out.code, EXIT_OPERATIONAL);
    assert!(out.stderr.contains("no map"));
}

#[test]
fn analyze_halving_map() {
    let dir = TempDir::new().unwrap();
    let p = write(dir.path(), "half.json", HALF);
    let out = bvfix(&["analyze", "--instance", p.to_str().unwrap(), "--format", "structured", "--no-timestamp"]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    let doc: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    let c = doc["result"]["contraction"]["banach_c"].as_f64().unwrap();
    assert!((c - 0.5).abs() < 1e-12);
    assert!(doc["result"]["hypotheses"]["kannan"]["details"].is_array());
}

#[test]
fn analyze_weak_map_with_modulus() {
    let dir = TempDir::new().unwrap();
    let entry = catalog::make_weak_contractive_classic();
    let p = write(dir.path(), "weak.json", &entry.instance.to_json());
    let out = bvfix(&["analyze", "--instance", p.to_str().unwrap(), "--phi", "t^2/(1+t)"]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    assert!(out.stdout.contains("weakly contractive: true"), "{}", out.stdout);
    assert!(out.stdout.contains("weak-contraction hypotheses: satisfied"));
}

#[test]
fn analyze_identity_satisfies_neither_theorem() {
    let dir = TempDir::new().unwrap();
    let p = write(dir.path(), "id.json", IDENTITY);
    let out = bvfix(&["analyze", "--instance", p.to_str().unwrap(), "--phi", "t/2"]);
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.contains("c_hat = 1"), "{}", out.stdout);
    assert!(out.stdout.contains("weak-contraction hypotheses: not satisfied"));
    assert!(out.stdout.contains("Kannan hypotheses: not satisfied"));
}

#[test]
fn solve_kannan_writes_csv() {
    let dir = TempDir::new().unwrap();
    let entry = catalog::make_kannan_classic();
    let p = write(dir.path(), "kannan.json", &entry.instance.to_json());
    let csv = dir.path().join("trace.csv");
    let out = bvfix(&["solve", "--instance", p.to_str().unwrap(), "--out", csv.to_str().unwrap()]);
    assert_eq!(out.code, EXIT_OK, "{}\n{}", out.stdout, out.stderr);
    assert!(out.stderr.is_empty());
    let body = std::fs::read_to_string(&csv).unwrap();
    let mut lines = body.lines();
    assert_eq!(lines.next(), Some("n,point,step_dist,rate_bound,decrease_slack"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[0], "0");
    let (step, bound): (f64, f64) = (first[2].parse().unwrap(), first[3].parse().unwrap());
    assert!(step <= bound);

    let out = bvfix(&["solve", "--instance", p.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(out.stdout, body);
}

#[test]
fn solve_swap_reports_cycle() {
    let dir = TempDir::new().unwrap();
    let p = write(dir.path(), "swap.json", &catalog::make_swap().instance.to_json());
    let out = bvfix(&["solve", "--instance", p.to_str().unwrap()]);
    assert_eq!(out.code, EXIT_MATH);
    assert!(out.stdout.contains("CycleDetected"));
}

#[test]
fn violated_hypothesis_warns_and_runs() {
    let dir = TempDir::new().unwrap();
    let entry = catalog::make_bv_finite(1, 3.0, 10).unwrap();
    let p = write(dir.path(), "bv.json", &entry.instance.to_json());
    let out = bvfix(&["solve", "--instance", p.to_str().unwrap(), "--gamma", "0.4"]);
    assert!(out.code == EXIT_OK || out.code == EXIT_MATH, "{}", out.stderr);
    assert!(out.stderr.contains("sγ ≤ 1"), "{}", out.stderr);
    assert!(out.stdout.contains("status: Converged"), "{}", out.stdout);
}

#[test]
fn structured_output_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let p = write(dir.path(), "kannan.json", &catalog::make_kannan_classic().instance.to_json());
    let args = ["verify", "--instance", p.to_str().unwrap(), "--format", "structured", "--no-timestamp", "--seed", "9", "--budget", "5000"];
    let a = bvfix(&args);
    let b = bvfix(&args);
    assert_eq!(a, b);
    let doc: serde_json::Value = serde_json::from_str(&a.stdout).unwrap();
    assert_eq!(doc["seed"], 9);
    assert_eq!(doc["budget"], 5000);
    assert!(doc.get("timestamp").is_none());
    let with_ts = bvfix(&args[..5]);
    assert!(with_ts.stdout.contains("\"timestamp\""));
}

#[test]
fn classify_reports_minimal_s() {
    let dir = TempDir::new().unwrap();
    let p = write(dir.path(), "sq.json", SQUARED);
    let out = bvfix(&["classify", "--instance", p.to_str().unwrap(), "--v-grid", "1"]);
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.contains("v=1: minimal s = 2 (exact); b-metric"), "{}", out.stdout);
}

#[test]
fn oracle_lists_fixed_points() {
    let dir = TempDir::new().unwrap();
    let p = write(dir.path(), "bv.json", &catalog::make_bv_finite(2, 1.0, 5).unwrap().instance.to_json());
    let out = bvfix(&["oracle", "--instance", p.to_str().unwrap()]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    assert!(out.stdout.contains("fixed points: [0]"));
}

#[test]
fn binary_uses_seed_environment_fallback() {
    let dir = TempDir::new().unwrap();
    let p = write(dir.path(), "metric.json", METRIC);
    let out = Command::new(env!("CARGO_BIN_EXE_bvfix"))
        .args(["verify", "--instance", p.to_str().unwrap(), "--no-timestamp"])
        .env("FIXPOINT_SEED", "31")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_OK));
    assert!(String::from_utf8_lossy(&out.stdout).contains("seed: 31"));

    let out = Command::new(env!("CARGO_BIN_EXE_bvfix"))
        .args(["verify", "--instance", "/nonexistent.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_OPERATIONAL));
}
