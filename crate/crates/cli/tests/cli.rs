use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn zerosum(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zerosum"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn exact_prints_value_and_stores_witness() {
    let dir = tempfile::tempdir().unwrap();
    let o = zerosum(&["exact", "--group", "3^2", "--constant", "eta"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "7");
    let files: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(files.len(), 1);
    let name = files[0].file_name().unwrap().to_str().unwrap().to_string();
    assert!(name.starts_with("3^2_eta_") && name.ends_with(".json"), "{name}");
    let rec: Value = serde_json::from_str(&std::fs::read_to_string(&files[0]).unwrap()).unwrap();
    assert_eq!(rec["value_or_bound"], 7);
    assert_eq!(rec["sequence"].as_array().unwrap().len(), 6);
}

#[test]
fn exact_json_output() {
    let dir = tempfile::tempdir().unwrap();
    let o = zerosum(&["exact", "--group", "2x4", "--format", "json"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["value"], 5);
    assert_eq!(v["certificate"]["bound_kind"], "exact");
}

#[test]
fn exact_budget_exhaustion_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = zerosum(&["exact", "--group", "3^3", "--constant", "eta", "--budget-nodes", "100"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(dir.path().join("3^3_eta.checkpoint.json").exists());
}

#[test]
fn usage_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(zerosum(&["frobnicate"], dir.path()).status.code(), Some(3));
    assert_eq!(zerosum(&["exact", "--group", "0"], dir.path()).status.code(), Some(3));
    assert_eq!(zerosum(&["exact", "--group", "3^2", "--constant", "zeta"], dir.path()).status.code(), Some(3));
    assert_eq!(zerosum(&["verify"], dir.path()).status.code(), Some(3));
    assert_eq!(zerosum(&["fourier", "--group", "5^4"], dir.path()).status.code(), Some(3));
}

#[test]
fn fourier_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let o = zerosum(&["fourier", "--threshold", "--group", "5^4", "--cap", "36"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "157");
}

#[test]
fn fourier_bias_of_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("seq.json");
    std::fs::write(&input, r#"{"group": "5^2", "sequence": [[1,0],[0,1],[1,1],[2,3]]}"#).unwrap();
    let o = zerosum(&["fourier", "--bias", input.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let _: Value = serde_json::from_str(&stdout(&o)).unwrap();
}

#[test]
fn bounds_and_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = zerosum(&["bounds", "--group", "3^2"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["row"]["d_exact"], 5);
    assert_eq!(v["row"]["thm1"], 5);

    let o = zerosum(&["table", "--max-order", "8"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("group,order,exponent,M,D_exact"));
    // header plus the 11 groups of order at most 8
    assert_eq!(text.lines().count(), 12);
}

#[test]
fn extract_with_schedule() {
    let dir = tempfile::tempdir().unwrap();
    let o = zerosum(&["extract", "--group", "2^4", "--schedule", "p2", "--samples", "3", "--seed", "4"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["samples"].as_array().unwrap().len(), 3);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn verify_suites_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    for suite in ["sec5", "sec3", "p2count", "propB", "lindstrom"] {
        let o = zerosum(&["verify", "--suite", suite], dir.path());
        assert_eq!(o.status.code(), Some(0), "{suite}");
        let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(v["status"], "verified");
    }
}

#[test]
fn z7_checkpoint_and_resume() {
    let dir = tempfile::tempdir().unwrap();
    let o = zerosum(&["verify", "--suite", "z7", "--budget-nodes", "300000"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let cp = dir.path().join("z7.checkpoint.json");
    assert!(cp.exists());
    let o = zerosum(&["verify", "--suite", "z7", "--resume", cp.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["status"], "verified");
}

#[test]
fn sampled_reports_are_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_zerosum"))
            .args(["verify", "--suite", "dav333d", "--samples", "300", "--seed", "9", "--format", "json"])
            .arg("--out")
            .arg(dir.path())
            .env("ZEROSUM_THREADS", threads)
            .output()
            .unwrap()
    };
    let a = run("1");
    let b = run("4");
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn bad_thread_count_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_zerosum"))
        .args(["verify", "--suite", "sec5"])
        .arg("--out")
        .arg(dir.path())
        .env("ZEROSUM_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
}
