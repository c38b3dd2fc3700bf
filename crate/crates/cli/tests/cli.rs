//! End-to-end checks of the hcube binary: exit codes, report formats,
//! determinism, and atomic output writes.

use std::path::Path;
use std::process::{Command, Output};

fn hcube(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hcube"))
        .args(args)
        .output()
        .expect("spawn hcube")
}

fn write(dir: &Path, name: &str, content: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path.to_string_lossy().into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

const FULL_CUBE: &str = r#"{"members":[{"coords":[]}]}"#;
const MID_SLAB: &str =
    r#"{"members":[{"coords":[{"kind":"interior","p1":0.25,"p2":0.75}]}]}"#;

#[test]
fn cube_measure_csv_header_and_pass() {
    let out = hcube(&["cube-measure", "--schedule", "0.5,0.3", "--format", "csv"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "delta,n,m,cells,total_volume,max_diameter"
    );
    assert_eq!(lines.count(), 2);
}

#[test]
fn cube_measure_budget_exceeded_exits_2() {
    let out = hcube(&["cube-measure", "--schedule", "0.05", "--budget", "10"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn bad_schedule_exits_1() {
    let out = hcube(&["cube-measure", "--schedule", "0.1,0.5"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("decreasing"));
}

#[test]
fn missing_input_file_exits_1() {
    let out = hcube(&["span", "--cylinder", "/nonexistent.json", "--queries", "/nope.json"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn cover_output_is_deterministic() {
    let a = hcube(&["cover", "--delta", "0.3", "--seed", "9", "--probes", "500"]);
    let b = hcube(&["cover", "--delta", "0.3", "--seed", "9", "--probes", "500"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn cover_writes_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = hcube(&[
        "cover",
        "--delta",
        "0.3",
        "--probes",
        "100",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&path).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["pass"], serde_json::Value::Bool(true));
    assert!(v["covering"]["cell_count"].as_u64().unwrap() > 0);
}

#[test]
fn invariance_axis_case_passes_with_csv_header() {
    let dir = tempfile::tempdir().unwrap();
    let set = write(dir.path(), "set.json", MID_SLAB);
    // reflection about the cube center fixes the slab
    let iso = write(
        dir.path(),
        "iso.json",
        r#"{"p":{"prefix":[],"tail":0.5},"q":{"prefix":[],"tail":0.5},
            "gens":[{"kind":"reflection","i":1}]}"#,
    );
    let out = hcube(&[
        "invariance",
        "--set",
        &set,
        "--isometry",
        &iso,
        "--schedule",
        "0.5,0.3,0.2",
        "--format",
        "csv",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), "delta,pi_E,upper_fE,gap,pass");
}

#[test]
fn invariance_escape_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let set = write(dir.path(), "set.json", FULL_CUBE);
    // translation by +0.5 on the first coordinate leaves the cube
    let iso = write(
        dir.path(),
        "iso.json",
        r#"{"p":{"prefix":[],"tail":0.0},"q":{"prefix":[],"tail":0.0},
            "gens":[{"kind":"translation","c":{"prefix":[0.5],"tail":0.0}}]}"#,
    );
    let out = hcube(&["invariance", "--set", &set, "--isometry", &iso]);
    assert_eq!(code(&out), 3);
    let v: serde_json::Value = serde_json::from_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(v["pass"], serde_json::Value::Bool(false));
    assert!(v["escape"]["value"].as_f64().unwrap() > 1.0);
}

#[test]
fn extend_accepts_span_queries_and_rejects_others() {
    let dir = tempfile::tempdir().unwrap();
    // translation by 0.1 along the first coordinate, sampled at two points
    let samples = write(
        dir.path(),
        "samples.json",
        r#"{"pairs":[
            [{"prefix":[0.0],"tail":0.0},{"prefix":[0.1],"tail":0.0}],
            [{"prefix":[0.5],"tail":0.0},{"prefix":[0.6],"tail":0.0}]
        ]}"#,
    );
    let in_span = write(dir.path(), "q1.json", r#"[{"prefix":[0.25],"tail":0.0}]"#);
    let out = hcube(&["extend", "--samples", &samples, "--queries", &in_span]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    let img = &v["rows"][0]["image"];
    assert!((img["prefix"][0].as_f64().unwrap() - 0.35).abs() < 1e-9);

    let off_span = write(dir.path(), "q2.json", r#"[{"prefix":[0.0,0.7],"tail":0.0}]"#);
    let out = hcube(&["extend", "--samples", &samples, "--queries", &off_span]);
    assert_eq!(code(&out), 1);
}

#[test]
fn span_reports_membership() {
    let dir = tempfile::tempdir().unwrap();
    let cyl = write(
        dir.path(),
        "cyl.json",
        r#"{"coords":[{"kind":"interior","p1":0.2,"p2":0.6},{"kind":"singleton","p1":0.5}]}"#,
    );
    let queries = write(
        dir.path(),
        "q.json",
        r#"[{"prefix":[0.4,0.5],"tail":0.3},{"prefix":[0.4,0.9],"tail":0.3}]"#,
    );
    let out = hcube(&["span", "--cylinder", &cyl, "--queries", &queries]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(v["rows"][0]["in_span"], serde_json::Value::Bool(true));
    assert_eq!(v["rows"][1]["in_span"], serde_json::Value::Bool(false));
}
