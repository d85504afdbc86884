//! End-to-end checks of the binary: exit codes, stdout contracts, report
//! determinism, and the golden fixture.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cuspsum"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cuspsum-test-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn read_single_json(dir: &Path, prefix: &str) -> (String, String) {
    let mut hits: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with(prefix) && n.ends_with(".json"))
        })
        .collect();
    assert_eq!(hits.len(), 1, "expected one {prefix}*.json in {dir:?}");
    let path = hits.pop().unwrap();
    let name = path.file_name().unwrap().to_str().unwrap().to_string();
    (name, std::fs::read_to_string(path).unwrap())
}

#[test]
fn exppairs_word_prints_pair() {
    let dir = temp_dir("exppairs");
    let out = run(&[
        "exppairs",
        "--word",
        "BABAAB",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(
        stdout(&out).contains("\u{27e8}2/9, 11/18\u{27e9}"),
        "stdout: {}",
        stdout(&out)
    );
}

#[test]
fn unknown_subcommand_exits_one() {
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
}

#[test]
fn moments_on_unit_impulse_reports_raw_100() {
    let dir = temp_dir("moments");
    let out = run(&[
        "moments",
        "--form",
        "unit_impulse",
        "--M",
        "100",
        "--k",
        "1",
        "--A",
        "4",
        "--n-max",
        "1024",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(
        stdout(&out).contains("raw = 100,"),
        "stdout: {}",
        stdout(&out)
    );
}

#[test]
fn coeffs_verify_delta() {
    let dir = temp_dir("coeffs");
    let out = run(&[
        "coeffs",
        "--form",
        "delta",
        "--n-max",
        "2000",
        "--verify",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("deligne_ok = true"), "stdout: {text}");
    assert!(text.contains("verify: deligne_ok true"), "stdout: {text}");
    // CSV table written alongside the report
    assert!(dir.join("coeffs_delta_2000.csv").exists());
}

#[test]
fn cap_excess_is_resource_refusal() {
    let dir = temp_dir("cap");
    let out = run(&[
        "coeffs",
        "--n-max",
        "2000000",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn non_coprime_config_rejected() {
    let dir = temp_dir("badcfg");
    let cfg = dir.join("bad.cfg");
    std::fs::write(&cfg, "k = 4\nh = 2\n").unwrap();
    let out = run(&["moments", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("coprime"));
}

#[test]
fn reports_identical_across_worker_counts() {
    let d1 = temp_dir("workers1");
    let d2 = temp_dir("workers2");
    for (dir, workers) in [(&d1, "1"), (&d2, "3")] {
        let out = run(&[
            "moments",
            "--form",
            "unit_impulse",
            "--M",
            "64",
            "--k",
            "1",
            "--A",
            "2",
            "--n-max",
            "256",
            "--workers",
            workers,
            "--out",
            dir.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    let (n1, a) = read_single_json(&d1, "moments_power");
    let (n2, b) = read_single_json(&d2, "moments_power");
    assert_eq!(n1, n2, "file names must not depend on worker count");
    assert_eq!(a, b, "report bytes must not depend on worker count");
}

#[test]
fn golden_exppairs_report() {
    let dir = temp_dir("golden");
    let fixture = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/exppairs.cfg");
    let out = run(&[
        "exppairs",
        "--config",
        fixture.to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let (name, got) = read_single_json(&dir, "exppairs_word");
    let golden_path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(&name);
    let expect = std::fs::read_to_string(&golden_path)
        .unwrap_or_else(|e| panic!("golden {golden_path:?}: {e}"));
    assert_eq!(got, expect, "regenerated report differs from the golden copy");
}
