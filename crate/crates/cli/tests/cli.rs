use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_subwalk"))
        .args(args)
        .env_remove("SUBWALK_THREADS")
        .output()
        .unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().unwrap()
}

#[test]
fn green_methods_agree_far_out() {
    let doc = json(&["green", "-d", "2", "-a", "1.0", "-x", "300,0", "--method", "all"]);
    assert_eq!(doc["command"], "green");
    assert_eq!(doc["config"]["alpha"], 1.0);
    let rows = doc["result"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    let q = rows[1]["value"].as_f64().unwrap();
    for r in rows {
        let v = r["value"].as_f64().unwrap();
        assert!((v - q).abs() / q < 1e-4, "{r}");
    }
}

#[test]
fn parameter_errors_exit_with_two() {
    assert_eq!(code(&["green", "-d", "1", "-a", "1.5", "-x", "3"]), 2);
    assert_eq!(code(&["green", "-d", "1", "-a", "0.5", "-x", "0", "--method", "asymptotic"]), 2);
    assert_eq!(code(&["green", "-d", "3", "-a", "0.5", "-x", "0"]), 2);
    assert_eq!(code(&["classify", "-d", "1", "-a", "0.5", "--family", "nosuch"]), 2);
    assert_eq!(code(&["sets", "--family", "power:beta=-1", "--prefix", "3"]), 2);
    assert_eq!(code(&["wiener", "-d", "1", "-a", "0.5", "--family", "primes", "--shells", "9..3"]), 2);
    let out = run(&["green", "-d", "1", "-a", "1.5", "-x", "3"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("not transient"));
}

#[test]
fn resource_errors_exit_with_three() {
    assert_eq!(code(&["sets", "--family", "all:d=2", "--shell", "40"]), 3);
}

#[test]
fn classify_examples() {
    let verdict = |d: &str, a: &str, f: &str| json(&["classify", "-d", d, "-a", a, "--family", f])["result"]["verdict"].clone();
    assert_eq!(verdict("2", "1.0", "axis"), "massive");
    assert_eq!(verdict("2", "0.3", "subthorn:t=n/loglog;base=primes"), "massive_by_sufficiency");
    assert_eq!(verdict("1", "0.12", "piatetski:beta=1.15"), "non_massive");
    assert_eq!(verdict("1", "0.5", "power:beta=3"), "non_massive");
}

#[test]
fn capacity_singleton_and_shells() {
    let g0 = json(&["green", "-d", "2", "-a", "1", "-x", "0,0"])["result"][0]["value"]
        .as_f64()
        .unwrap();
    let doc = json(&["capacity", "-d", "2", "-a", "1", "--points", "4,-2", "--weights"]);
    let cap = doc["result"]["capacity"].as_f64().unwrap();
    assert!((cap * g0 - 1.0).abs() < 1e-12);
    assert_eq!(doc["result"]["weights"].as_array().unwrap().len(), 1);

    let doc = json(&["capacity", "-d", "1", "-a", "0.5", "--family", "primes", "--shell", "6"]);
    let r = &doc["result"];
    let cap = r["capacity"].as_f64().unwrap();
    assert!(r["bounds"]["lower"].as_f64().unwrap() <= cap && cap <= r["bounds"]["upper"].as_f64().unwrap());

    let doc = json(&[
        "capacity", "-d", "1", "-a", "0.5", "--family", "primes", "--shell", "10", "--solver-cap", "40",
    ]);
    let r = &doc["result"];
    assert_eq!(r["subsampled"], true);
    assert_eq!(r["solved"], 40);
    assert!(r["lower"].as_f64().unwrap() <= r["upper"].as_f64().unwrap());
}

#[test]
fn wiener_writes_json_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let json_path = dir.path().join("report.json");
    let csv_path = dir.path().join("report.csv");
    let doc = json(&[
        "wiener",
        "-d",
        "1",
        "-a",
        "0.5",
        "--family",
        "bucy:alpha=0.5",
        "--shells",
        "2..12",
        "--json",
        json_path.to_str().unwrap(),
        "--csv",
        csv_path.to_str().unwrap(),
    ]);
    assert_eq!(doc["result"]["verdict"], "converges");
    let file: Value = serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    assert_eq!(file["terms"].as_array().unwrap().len(), 11);
    assert_eq!(file["schema_version"], 1);
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    assert_eq!(csv.lines().count(), 12);
    assert!(csv.starts_with("n,size,"));
}

#[test]
fn simulate_is_reproducible_across_thread_counts() {
    let args = [
        "simulate", "-d", "1", "-a", "0.8", "--family", "primes", "--paths", "300", "--horizon", "200",
        "--horizons", "10,50", "--seed", "5",
    ];
    let a = json(&args);
    let out = Command::new(env!("CARGO_BIN_EXE_subwalk"))
        .args(args)
        .env("SUBWALK_THREADS", "3")
        .output()
        .unwrap();
    let b: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(b["threads"], 3);
    assert_eq!(a["result"], b["result"]);
    let curve = a["result"]["curve"].as_array().unwrap();
    assert!(curve[0]["hits"].as_u64() <= curve[1]["hits"].as_u64());
    assert_eq!(a["result"]["plan"]["seed"], 5);
}

#[test]
fn simulate_whole_space_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    let doc = json(&[
        "simulate", "-d", "2", "-a", "1.2", "--family", "all:d=2", "--start", "3,4", "--paths", "25",
        "--horizon", "1", "--trace", trace.to_str().unwrap(),
    ]);
    assert_eq!(doc["result"]["estimate"]["estimate"], 1.0);
    let rows = std::fs::read_to_string(&trace).unwrap();
    assert_eq!(rows.lines().count(), 26);
    assert!(rows.lines().nth(1).unwrap().ends_with("hit,1"));
}

#[test]
fn bad_thread_count_is_a_parameter_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_subwalk"))
        .args(["classify", "-d", "2", "-a", "1", "--family", "axis"])
        .env("SUBWALK_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sets_queries() {
    let doc = json(&["sets", "--family", "primes", "--shell", "2"]);
    assert_eq!(doc["result"]["points"], serde_json::json!([[5, 0], [7, 0]]));
    let doc = json(&["sets", "--family", "power:beta=2", "--prefix", "4"]);
    assert_eq!(doc["result"]["prefix"], serde_json::json!([1, 4, 9, 16]));
    let doc = json(&["sets", "--family", "thorn:t=n/log", "--contains", "0,9"]);
    assert_eq!(doc["result"]["contains"], true);
    let doc = json(&["sets", "--family", "axis"]);
    assert_eq!(doc["result"]["dim"], 2);
}
