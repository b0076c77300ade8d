use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use actsched::experiments::SECTION5_JSON;

const SMALL: &str = r#"{
  "kind": "generic",
  "horizon": 3,
  "a": [[0.9, 0.3], [-0.2, 1.1]],
  "b": [[[1.0], [0.0]], [[0.0], [1.0]], [[0.7], [0.7]]],
  "q": [[1.0, 0.0], [0.0, 0.5]],
  "q_terminal": [[1.0, 0.0], [0.0, 1.0]],
  "r": [[[1.0]], [[1.0]], [[2.0]]],
  "w_init": [[1.0, 0.0], [0.0, 1.0]],
  "w": [[0.3, 0.0], [0.0, 0.2]],
  "costs": [0.1, 0.2, 0.0]
}"#;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_actsched"));
    c.env_remove("ACTSCHED_OUT_DIR");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

struct Files {
    dir: tempfile::TempDir,
}

impl Files {
    fn new() -> Self {
        Self { dir: tempfile::tempdir().unwrap() }
    }

    fn write(&self, name: &str, text: &str) -> PathBuf {
        let p = self.dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_bundled_model() {
    let f = Files::new();
    let m = f.write("section5.json", SECTION5_JSON);
    let o = run(&["validate", s(&m)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("horizon 30"));
}

#[test]
fn brute_force_on_long_horizon_hits_the_cap() {
    let f = Files::new();
    let m = f.write("section5.json", SECTION5_JSON);
    let o = run(&["schedule", s(&m), "--method", "brute"]);
    assert_eq!(code(&o), 4);
    assert!(stderr(&o).contains("6^30"), "{}", stderr(&o));
    let o = run(&["bound", s(&m)]);
    assert_eq!(code(&o), 4);
}

#[test]
fn json_errors_are_machine_readable() {
    let f = Files::new();
    let m = f.write("section5.json", SECTION5_JSON);
    let o = run(&["--json-errors", "schedule", s(&m), "--method", "brute"]);
    assert_eq!(code(&o), 4);
    let v: serde_json::Value = serde_json::from_str(stderr(&o).trim()).unwrap();
    assert_eq!(v["error"], "cap_exceeded");
    assert_eq!(v["exit_code"], 4);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&run(&["frobnicate"])), 1);
    assert_eq!(code(&run(&["schedule"])), 1);
    assert_eq!(code(&run(&["schedule", "m.json", "--method", "nope"])), 1);
}

#[test]
fn help_and_version_everywhere() {
    for args in [
        &["--help"][..],
        &["--version"],
        &["validate", "--help"],
        &["relax", "--help"],
        &["schedule", "--help"],
        &["evaluate", "--help"],
        &["bound", "--help"],
        &["experiment", "section5", "--help"],
        &["histogram", "--help"],
    ] {
        let o = run(args);
        assert_eq!(code(&o), 0, "{args:?}");
        assert!(!stdout(&o).is_empty());
    }
}

#[test]
fn invalid_model_exits_two_with_path() {
    let f = Files::new();
    let bad = SECTION5_JSON.replacen("0.2", "-0.1", 1);
    let m = f.write("bad.json", &bad);
    let o = run(&["validate", s(&m)]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("edges[0]"), "{}", stderr(&o));
    assert_eq!(code(&run(&["validate", "/definitely/not/here.json"])), 2);
}

#[test]
fn evaluate_schedule_file() {
    let f = Files::new();
    let m = f.write("small.json", SMALL);
    let sched = f.write("s.json", "[[1], [3], [2]]");
    let o = run(&["evaluate", s(&m), s(&sched)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["j2"].as_f64().unwrap() - 0.3).abs() < 1e-12);
    let bad = f.write("bad.json", "[[1], [4], [2]]");
    assert_eq!(code(&run(&["evaluate", s(&m), s(&bad)])), 2);
}

#[test]
fn schedule_methods_write_reports() {
    let f = Files::new();
    let m = f.write("small.json", SMALL);
    for method in ["track", "greedy", "random", "maxtheta", "brute"] {
        let out = f.path(&format!("{method}.csv"));
        let o = run(&["schedule", s(&m), "--method", method, "--seed", "4", "--format", "csv", "--out", s(&out)]);
        assert_eq!(code(&o), 0, "{method}: {}", stderr(&o));
        let text = std::fs::read_to_string(&out).unwrap();
        assert_eq!(text.lines().count(), 4, "{method}");
    }
}

#[test]
fn default_seed_is_printed() {
    let f = Files::new();
    let m = f.write("small.json", SMALL);
    let o = run(&["schedule", s(&m), "--method", "random", "--count", "5"]);
    assert_eq!(code(&o), 0);
    assert!(stderr(&o).contains("seed: "), "{}", stderr(&o));
}

#[test]
fn reruns_are_byte_identical() {
    let f = Files::new();
    let m = f.write("small.json", SMALL);
    let a = run(&["schedule", s(&m), "--method", "random", "--seed", "9", "--count", "50"]);
    let b = run(&["schedule", s(&m), "--method", "random", "--seed", "9", "--count", "50"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn relax_and_bound_on_small_model() {
    let f = Files::new();
    let m = f.write("small.json", SMALL);
    let log = f.path("log.csv");
    let o = run(&["relax", s(&m), "--eps", "1e-8", "--log", s(&log)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["stats"]["status"], "solved");
    assert!(std::fs::read_to_string(&log).unwrap().starts_with("iter,primal,dual,gap"));

    let o = run(&["bound", s(&m), "--eps", "1e-8"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["bound"]["holds"], true);
    assert!(v["bound"]["epsilon"].as_f64().unwrap() >= 0.0);
}

#[test]
fn solver_failure_exits_three() {
    let f = Files::new();
    let m = f.write("small.json", SMALL);
    let o = run(&["relax", s(&m), "--max-iter", "3"]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
}

#[test]
fn histogram_writes_samples_and_cdf() {
    let f = Files::new();
    let m = f.write("small.json", SMALL);
    let out = f.path("h/hist.csv");
    let o = run(&["histogram", s(&m), "--count", "1", "--seed", "2", "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 2);
    assert_eq!(std::fs::read_to_string(f.path("h/hist.cdf.csv")).unwrap().lines().count(), 2);
}

#[test]
fn histogram_honors_output_directory_variable() {
    let f = Files::new();
    let m = f.write("small.json", SMALL);
    let o = bin()
        .args(["histogram", s(&m), "--count", "3", "--seed", "1"])
        .env("ACTSCHED_OUT_DIR", f.path("env"))
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(f.path("env/histogram.csv").exists());
}
