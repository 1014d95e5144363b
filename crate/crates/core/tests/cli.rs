use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_juntalab"))
        .args(args)
        .current_dir(root())
        .env_remove("JUNTALAB_SEED")
        .output()
        .unwrap()
}

fn lines(out: &Output) -> Vec<Value> {
    String::from_utf8(out.stdout.clone()).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn junta_on_two_mode_fixture() {
    let out = run(&["junta", "--fn", "fixtures/two_mode.json", "--epsilon", "0.05", "--mode", "empirical"]);
    assert_eq!(out.status.code(), Some(0));
    let recs = lines(&out);
    assert_eq!(recs.len(), 1);
    assert_eq!(recs[0]["S"], serde_json::json!([1, 2]));
    assert_eq!(recs[0]["kind"], "junta");
    assert_eq!(recs[0]["seed"], 0);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["junta", "--fn", "fixtures/two_mode.json", "--epsilon", "3.0"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&[]).status.code(), Some(2));
    assert_eq!(run(&["junta", "--fn", "missing.json", "--epsilon", "0.1"]).status.code(), Some(2));
    let both = run(&["oracle", "--fn", "fixtures/two_mode.json", "--p", "1", "--points", "8", "--samples", "64"]);
    assert_eq!(both.status.code(), Some(2));
    let bad_out = run(&["oracle", "--fn", "fixtures/two_mode.json", "--p", "1", "--out", "/nonexistent/dir/r.jsonl"]);
    assert_eq!(bad_out.status.code(), Some(2));
    assert!(!bad_out.stderr.is_empty());
}

#[test]
fn help_exits_zero() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    for cmd in ["influences", "junta", "verify", "hamming", "isoperimetry", "oracle"] {
        assert!(String::from_utf8_lossy(&out.stdout).contains(cmd), "{cmd}");
    }
}

#[test]
fn seed_from_environment() {
    let args = ["verify", "--suite", "suites/smoke.json"];
    let flag = run(&[&args[..], &["--seed", "5"]].concat());
    let env = Command::new(env!("CARGO_BIN_EXE_juntalab"))
        .args(args)
        .current_dir(root())
        .env("JUNTALAB_SEED", "5")
        .output()
        .unwrap();
    assert_eq!(flag.stdout, env.stdout);
    assert_eq!(lines(&flag)[0]["seed"], 5);
}

#[test]
fn single_check_report_has_all_fields() {
    let out = run(&["verify", "--fn", "fixtures/two_mode.json", "--check", "heat_l1", "--t", "0.1"]);
    assert_eq!(out.status.code(), Some(0));
    let recs = lines(&out);
    assert_eq!(recs.len(), 1);
    for field in [
        "tool",
        "tool_version",
        "kind",
        "seed",
        "name",
        "n",
        "t",
        "lhs",
        "rhs",
        "slack",
        "lhs_half_width",
        "rhs_half_width",
        "tolerance",
        "pass",
        "convention",
    ] {
        assert!(recs[0].get(field).is_some(), "missing {field}");
    }
    assert_eq!(recs[0]["pass"], true);
}

#[test]
fn csv_and_json_agree() {
    let json = run(&["verify", "--suite", "suites/smoke.json", "--seed", "2"]);
    let csv_out = run(&["verify", "--suite", "suites/smoke.json", "--seed", "2", "--format", "csv"]);
    let recs = lines(&json);
    let mut reader = csv::Reader::from_reader(csv_out.stdout.as_slice());
    let header = reader.headers().unwrap().clone();
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), recs.len());
    for (row, rec) in rows.iter().zip(&recs) {
        for (name, cell) in header.iter().zip(row.iter()) {
            match &rec[name] {
                Value::Number(n) => {
                    let (a, b) = (n.as_f64().unwrap(), cell.parse::<f64>().unwrap());
                    assert!((a - b).abs() <= 5e-6 * a.abs().max(1e-300), "{name}: {a} vs {b}");
                }
                Value::Null => assert_eq!(cell, ""),
                Value::String(s) => assert_eq!(cell, s),
                Value::Bool(v) => assert_eq!(cell, v.to_string()),
                other => panic!("unexpected nested value {other}"),
            }
        }
    }
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.jsonl");
    let to_file = run(&["influences", "--fn", "fixtures/two_mode.json", "--out", path.to_str().unwrap()]);
    assert_eq!(to_file.status.code(), Some(0));
    assert!(to_file.stdout.is_empty());
    let stdout = run(&["influences", "--fn", "fixtures/two_mode.json"]);
    assert_eq!(std::fs::read(&path).unwrap(), stdout.stdout);
    assert_eq!(lines(&stdout).len(), 4);
}

#[test]
fn isoperimetry_on_slabs() {
    let out = run(&[
        "isoperimetry",
        "--a",
        "fixtures/slab_a.json",
        "--b",
        "fixtures/slab_b.json",
        "--delta",
        "0.4",
        "--points",
        "32",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let recs = lines(&out);
    assert_eq!(recs[0]["S"], serde_json::json!([1]));
    assert_eq!(recs[0]["pass"], true);
}

#[test]
fn isoperimetry_rejects_close_sets() {
    let out = run(&["isoperimetry", "--a", "fixtures/slab_a.json", "--b", "fixtures/slab_b.json", "--delta", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn hamming_on_sine_family() {
    let out = run(&["hamming", "--map", "fixtures/sine_map.json", "--epsilon", "0.5", "--points", "24"]);
    let recs = lines(&out);
    assert_eq!(recs.len(), 1);
    assert_eq!(out.status.code(), Some(if recs[0]["pass"] == true { 0 } else { 1 }));
    assert_eq!(recs[0]["m"], 3);
}

#[test]
fn oracle_on_fixture() {
    let out = run(&["oracle", "--fn", "fixtures/two_mode.json", "--p", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let recs = lines(&out);
    assert_eq!(recs[0]["S"], serde_json::json!([1, 2]));
    // sizes 0, 1 and 2 out of 4 coordinates
    assert_eq!(recs[0]["subsets"], 11);
}
