use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crashgather")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn bundled_run_writes_trace_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(&["run", "--bundled", "ssync_n3_f2", "--out", path(dir.path())]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let trace = fs::read_to_string(dir.path().join("trace.jsonl")).unwrap();
    assert!(trace.lines().count() > 3);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["outcome"]["status"], "gathered");
    assert_eq!(report["expectation_met"], true);
}

#[test]
fn expected_nonconvergence_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(&["run", "--bundled", "impossibility_two_mult", "--budget", "300", "--out", path(dir.path())]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report = fs::read_to_string(dir.path().join("report.json")).unwrap();
    assert!(report.contains("budget_exhausted"));
}

#[test]
fn unmet_expectation_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let mut s: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../core/scenarios/async_stale_look.json")).unwrap(),
    )
    .unwrap();
    s["expect"] = "gathered".into();
    let file = dir.path().join("s.json");
    fs::write(&file, s.to_string()).unwrap();
    let o = bin(&["run", "--scenario", path(&file), "--out", path(dir.path())]);
    assert_eq!(code(&o), 1);
}

#[test]
fn schema_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.json");
    fs::write(&file, "{ not json").unwrap();
    assert_eq!(code(&bin(&["run", "--scenario", path(&file)])), 2);
    assert_eq!(code(&bin(&["validate", "--scenario", path(&file)])), 2);
    assert_eq!(code(&bin(&["validate", "--bundled", "no_such_thing"])), 2);
    assert_eq!(code(&bin(&["frobnicate"])), 2);
}

#[test]
fn excess_faults_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let mut s: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../core/scenarios/async_n7_k3.json")).unwrap(),
    )
    .unwrap();
    s["crashes"] = serde_json::json!([[0, 1.0], [1, 2.0]]);
    let file = dir.path().join("s.json");
    fs::write(&file, s.to_string()).unwrap();
    let o = bin(&["validate", "--scenario", path(&file)]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("fault budget"));
    let o = bin(&["batch", "--mode", "async-ic", "--n", "7", "--faults", "2", "--seeds", "1"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn every_bundled_scenario_validates() {
    let names = String::from_utf8(bin(&["validate", "--list"]).stdout).unwrap();
    assert!(names.lines().count() >= 9);
    for name in names.lines() {
        let o = bin(&["validate", "--bundled", name]);
        assert_eq!(code(&o), 0, "{name}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn batch_prints_a_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(&["batch", "--n", "3..5", "--faults", "all", "--seeds", "3", "--out", path(dir.path())]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let table = String::from_utf8(o.stdout).unwrap();
    assert!(table.contains("greedy_minimal"));
    assert_eq!(table.lines().count(), 1 + 3 * (3 + 4 + 5));
    assert!(dir.path().join("batch.json").exists());
}

#[test]
fn identical_invocations_give_identical_bytes() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let o = bin(&["run", "--bundled", "taxonomy_c1k", "--seed", "9", "--out", path(d.path())]);
        assert_eq!(code(&o), 0);
        let o = bin(&[
            "render",
            "--trace",
            path(&d.path().join("trace.jsonl")),
            "--every",
            "25",
            "--out",
            path(&d.path().join("frames")),
        ]);
        assert_eq!(code(&o), 0);
    }
    for f in ["trace.jsonl", "report.json", "frames/frame_00000.svg", "frames/frame_00001.svg"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn render_counts_frames_and_accepts_empty_traces() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&bin(&["run", "--bundled", "ssync_n3_f2", "--format", "json", "--out", path(dir.path())])), 0);
    let trace: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("trace.json")).unwrap()).unwrap();
    let events = trace["events"].as_array().unwrap().len();
    let frames = dir.path().join("frames");
    let o = bin(&["render", "--trace", path(&dir.path().join("trace.json")), "--every", "4", "--out", path(&frames)]);
    assert_eq!(code(&o), 0);
    assert_eq!(fs::read_dir(&frames).unwrap().count(), events.div_ceil(4));

    let empty = dir.path().join("empty.jsonl");
    fs::write(&empty, "").unwrap();
    let out = dir.path().join("none");
    let o = bin(&["render", "--trace", path(&empty), "--out", path(&out)]);
    assert_eq!(code(&o), 0);
    assert_eq!(fs::read_dir(&out).unwrap().count(), 0);
    assert_eq!(code(&bin(&["render", "--trace", path(&empty), "--every", "0"])), 2);
}
