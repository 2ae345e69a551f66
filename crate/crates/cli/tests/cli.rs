use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_toric-koszul"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn report(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

#[test]
fn validate_builtin_p2() {
    let out = run(&["--builtin", "p2", "--suite", "validate"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["fan"]["smooth"], true);
    assert_eq!(r["fan"]["complete"], true);
    assert!(r["checks"].as_array().unwrap().iter().all(|c| c["status"] == "pass"));
}

#[test]
fn validate_fan_file() {
    let dir = tempfile::tempdir().unwrap();
    let fan = write(dir.path(), "p2.json", r#"{"rank": 2, "rays": [[1,0],[0,1],[-1,-1]], "cones": [[0,1],[1,2],[0,2]]}"#);
    let out = run(&["--fan", &fan, "--suite", "validate"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["fan"]["name"], "p2");
}

#[test]
fn serre_check_p1_o1() {
    let dir = tempfile::tempdir().unwrap();
    let sheaf = write(dir.path(), "o1.json", r#"{"kind": "line_bundles", "divisors": [[1, 0]]}"#);
    let target = dir.path().join("report.json");
    let out = run(&["--builtin", "p1", "--sheaf", &sheaf, "--suite", "serre-check", "--out", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(target).unwrap()).unwrap();
    assert_eq!(r["suite"], "serre-check");
    assert!(!r["checks"].as_array().unwrap().is_empty());
}

#[test]
fn koszul_selfcheck_a2_with_window() {
    let out = run(&["--builtin", "a2", "--suite", "koszul-selfcheck", "--window", "-1..1", "--jobs", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["window"]["lo"], serde_json::json!([-1, -1]));
}

#[test]
fn complete_acyclicity_is_inapplicable_on_a2() {
    let out = run(&["--builtin", "a2", "--suite", "complete-acyclicity"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(report(&out)["checks"].as_array().unwrap().iter().all(|c| c["status"] == "inapplicable"));
}

#[test]
fn input_errors_exit_2() {
    assert_eq!(run(&["--builtin", "p2", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(run(&["--builtin", "p7"]).status.code(), Some(2));
    assert_eq!(run(&["--builtin", "p2", "--window", "3..1"]).status.code(), Some(2));
    assert_eq!(run(&["--fan", "/nonexistent/fan.json"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{\"rank\": 2,\n \"rays\": [[1, 0],");
    let out = run(&["--fan", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    // A non-locally-free sheaf has no Serre check.
    let point = write(dir.path(), "pt.json", r#"{"kind": "standard_point", "cone": [0], "twist": [0]}"#);
    assert_eq!(run(&["--builtin", "p1", "--sheaf", &point, "--suite", "serre-check"]).status.code(), Some(2));
}

#[test]
fn reports_are_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let sheaf = write(dir.path(), "o.json", r#"{"kind": "line_bundles", "divisors": [[0, 0, 1, 0]]}"#);
    let args = ["--builtin", "p1xp1", "--sheaf", sheaf.as_str(), "--suite", "cousin-check"];
    let a = run(&[&args[..], &["--jobs", "1"]].concat());
    let b = run(&[&args[..], &["--jobs", "4"]].concat());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}
