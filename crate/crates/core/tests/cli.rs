use std::process::Command;

fn bssp(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_bssp")).args(args).output().unwrap()
}

#[test]
fn oversized_solve_exits_with_resource_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = bssp(&["--out", dir.path().to_str().unwrap(), "solve", "--n", "8", "--d", "3"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("BSSP register width"));
}

#[test]
fn bad_arguments_exit_with_usage_code() {
    assert_eq!(bssp(&["solve", "--n", "x", "--d", "1"]).status.code(), Some(2));
    assert_eq!(bssp(&["o2h", "--n", "1", "--d", "1", "--distinguisher", "nope"]).status.code(), Some(2));
}

#[test]
fn solve_writes_report_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = bssp(&["--out", dir.path().to_str().unwrap(), "solve", "--n", "2", "--d", "1", "--trials", "20"]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("solve.json")).unwrap()).unwrap();
    assert_eq!(report["oracle_calls_per_sample"], serde_json::json!([2]));
    assert_eq!(report["equation_violations"], 0);
    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "solve");
    assert_eq!(manifest["n"], 2);
}

#[test]
fn tampered_output_fails_replay() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().to_str().unwrap();
    assert_eq!(bssp(&["--out", path, "bfp", "--n", "2", "--d", "1", "--trials", "50"]).status.code(), Some(0));
    let json = dir.path().join("bfp.json");
    let mut text = std::fs::read_to_string(&json).unwrap();
    text.push(' ');
    std::fs::write(&json, text).unwrap();
    let manifest = dir.path().join("manifest.json");
    assert_eq!(bssp(&["replay", manifest.to_str().unwrap()]).status.code(), Some(1));
}
