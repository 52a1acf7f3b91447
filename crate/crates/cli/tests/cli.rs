//! Behavioural tests of the binary: artifact shapes, exit codes, and
//! output determinism.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_psiperm")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(bin())
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn psiperm")
}

fn write(dir: &Path, name: &str, contents: &str) {
    std::fs::write(dir.join(name), contents).unwrap();
}

const GOLDEN: &str = r#"{"label": "golden", "kind": "periodic", "a0": 0, "period": [1]}"#;

const PAIR: &str = r#"[
  {"label": "golden", "kind": "periodic", "a0": 0, "period": [1]},
  {"label": "sqrt2m1", "kind": "periodic", "a0": 0, "period": [2]}
]"#;

#[test]
fn expand_prints_fibonacci_denominators() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "golden.json", GOLDEN);
    let out = run_in(
        dir.path(),
        &["expand", "golden.json", "6", "--format", "csv"],
    );
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let qs: Vec<&str> = text
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap())
        .collect();
    assert_eq!(qs, vec!["1", "1", "2", "3", "5", "8"]);
}

#[test]
fn expand_periodic_pattern() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "p.json",
        r#"{"label": "p", "kind": "periodic", "a0": 0, "period": [1, 2]}"#,
    );
    let out = run_in(dir.path(), &["expand", "p.json", "5", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let qs: Vec<&str> = text
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap())
        .collect();
    assert_eq!(qs, vec!["1", "1", "3", "4", "11"]);
}

#[test]
fn malformed_spec_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "bad.json",
        r#"{"label": "x", "kind": "periodic", "junk": 1}"#,
    );
    let out = run_in(dir.path(), &["expand", "bad.json", "4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
}

#[test]
fn reversed_window_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "pair.json", PAIR);
    let out = run_in(
        dir.path(),
        &["trace", "pair.json", "--t-min", "99", "--t-max", "12"],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn identical_members_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "same.json",
        r#"[
  {"label": "a", "kind": "periodic", "a0": 0, "period": [1]},
  {"label": "b", "kind": "periodic", "a0": 0, "period": [1]}
]"#,
    );
    let out = run_in(
        dir.path(),
        &[
            "trace",
            "same.json",
            "--t-min",
            "2",
            "--t-max",
            "40",
            "--depth",
            "24",
        ],
    );
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn trace_writes_both_artifacts_atomically() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "pair.json", PAIR);
    let out = run_in(
        dir.path(),
        &[
            "trace",
            "pair.json",
            "--t-min",
            "3",
            "--t-max",
            "29",
            "--out",
            "tr",
        ],
    );
    assert!(out.status.success());
    let json = std::fs::read_to_string(dir.path().join("tr.json")).unwrap();
    let csv = std::fs::read_to_string(dir.path().join("tr.csv")).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
    let events = parsed["events"].as_array().unwrap();
    assert_eq!(events.len(), 6); // alternates from t = 3 through 29
    assert_eq!(events[0]["sigma"][0], "sqrt2m1");
    assert!(csv.lines().next().unwrap().starts_with("label,"));
    assert!(csv.lines().any(|l| l.starts_with("golden,")));

    // identical invocation, identical bytes
    let out2 = run_in(
        dir.path(),
        &[
            "trace",
            "pair.json",
            "--t-min",
            "3",
            "--t-max",
            "29",
            "--out",
            "tr2",
        ],
    );
    assert!(out2.status.success());
    assert_eq!(
        json,
        std::fs::read_to_string(dir.path().join("tr2.json")).unwrap()
    );
}

#[test]
fn kindex_reports_both_orderings() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "pair.json", PAIR);
    let out = run_in(
        dir.path(),
        &[
            "kindex",
            "pair.json",
            "--t-min",
            "3",
            "--t-max",
            "1000",
            "--burn-in",
            "0.5",
        ],
    );
    assert!(out.status.success());
    let parsed: serde_json::Value =
        serde_json::from_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(parsed["distinct"], 2);
}

#[test]
fn construct_verify_scan_signs_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "pair.json", PAIR);
    let out = run_in(
        dir.path(),
        &[
            "construct",
            "--k",
            "3",
            "--rounds",
            "4",
            "--state",
            "st.json",
        ],
    );
    assert!(out.status.success());
    // a one-round burn-in would start below the first denominators
    let out = run_in(
        dir.path(),
        &["verify", "--state", "st.json", "--burn-in-rounds", "1"],
    );
    assert_eq!(out.status.code(), Some(2));
    let out = run_in(
        dir.path(),
        &["verify", "--state", "st.json", "--burn-in-rounds", "2"],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let parsed: serde_json::Value =
        serde_json::from_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(parsed["distinct_orderings"], 3);

    // trace the constructed tuple through the state file
    let t_min: String = {
        let state: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join("st.json")).unwrap())
                .unwrap();
        state["t"]["6"].as_str().unwrap().to_string()
    };
    let out = run_in(
        dir.path(),
        &[
            "trace",
            "--state",
            "st.json",
            "--t-min",
            &t_min,
            "--t-max",
            "999999999",
            "--format",
            "csv",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let out = run_in(
        dir.path(),
        &[
            "scan-signs",
            "pair.json",
            "--t-min",
            "3",
            "--t-max",
            "100000",
        ],
    );
    assert!(out.status.success());
    let parsed: serde_json::Value =
        serde_json::from_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert!(parsed["alternations"].as_u64().unwrap() >= 1);
}

#[test]
fn scan_lemma_pair_and_exhaustive() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "pair.json", PAIR);
    let out = run_in(
        dir.path(),
        &["scan-lemma", "pair.json", "--scan-depth", "12"],
    );
    assert!(out.status.success());

    let out = run_in(
        dir.path(),
        &[
            "scan-lemma",
            "--exhaustive-len",
            "5",
            "--exhaustive-bound",
            "2",
        ],
    );
    assert!(out.status.success());
    let parsed: serde_json::Value =
        serde_json::from_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(parsed["violations"], 0);
    assert!(parsed["findings"].as_u64().unwrap() > 0);
}

#[test]
fn depth_env_override_is_validated() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "golden.json", GOLDEN);
    let out = Command::new(bin())
        .current_dir(dir.path())
        .env("PSIPERM_MAX_DEPTH", "not-a-number")
        .args(["psi", "golden.json", "--t-max", "10"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = Command::new(bin())
        .current_dir(dir.path())
        .env("PSIPERM_MAX_DEPTH", "32")
        .args(["psi", "golden.json", "--t-max", "10", "--format", "csv"])
        .output()
        .unwrap();
    assert!(out.status.success());
}

#[test]
fn psi_csv_matches_step_structure() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "golden.json", GOLDEN);
    let out = run_in(
        dir.path(),
        &["psi", "golden.json", "--t-max", "12", "--format", "csv"],
    );
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "t_start,t_end,nu,q_nu,xi_lo,xi_hi");
    assert_eq!(rows[1], "1,1,1,1,1/3,1/2");
    assert_eq!(rows[2], "2,2,2,2,1/5,1/3");
    assert_eq!(rows[3], "3,4,3,3,1/8,1/5");
    assert_eq!(rows[4], "5,7,4,5,1/13,1/8");
    assert_eq!(rows[5], "8,12,5,8,1/21,1/13");
}
