//! Shared helpers for the CLI integration tests.
#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_robust-mallows"))
}

pub fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().expect("binary runs")
}

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}

pub const EXPERIMENT_SPEC: &str = r#"{
  "model": {"n": 6, "phi": 0.7, "central": "random"},
  "samples": 300,
  "eps": [0.0, 0.1],
  "strategies": [{"kind": "reversal"}, {"kind": "uniform_junk"}],
  "replicates": 1,
  "baseline": true
}
"#;

/// Every subcommand, in pipeline order. Each entry writes its output into the working directory.
pub const CHAIN: &[&[&str]] = &[
    &["sample", "--n", "6", "--phi", "0.7", "--samples", "200", "--seed", "11", "--out", "data.jsonl"],
    &["corrupt", "--input", "data.jsonl", "--eps", "0.1", "--strategy", "reversal", "--seed", "12", "--out", "bad.jsonl"],
    &[
        "estimate", "--input", "bad.jsonl", "--eps", "0.1", "--seed", "13", "--truth", "data.truth.json", "--baseline",
        "--out", "estimate.json",
    ],
    &["evaluate", "--report", "estimate.json", "--truth", "data.truth.json", "--out", "metrics.json"],
    &["oracle-check", "blocks", "--out", "oracle-blocks.json"],
    &["experiment", "--spec", "spec.json", "--seed", "14", "--out-dir", "grid", "--threads", "2"],
];

/// Runs [`CHAIN`] in `dir` and returns every produced file as (relative path, bytes), sorted.
pub fn run_chain(dir: &Path) -> Vec<(String, Vec<u8>)> {
    std::fs::write(dir.join("spec.json"), EXPERIMENT_SPEC).unwrap();
    for args in CHAIN {
        let out = run_in(dir, args);
        assert!(
            out.status.success(),
            "{args:?} failed: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let mut files = Vec::new();
    collect(dir, dir, &mut files);
    files.retain(|(name, _)| name != "spec.json");
    files.sort();
    files
}

fn collect(root: &Path, dir: &Path, out: &mut Vec<(String, Vec<u8>)>) {
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.is_dir() {
            collect(root, &path, out);
        } else {
            let rel = path.strip_prefix(root).unwrap().to_string_lossy().replace('\\', "/");
            out.push((rel, std::fs::read(&path).unwrap()));
        }
    }
}

/// Names of files whose bytes differ from the checked-in golden copies, plus missing or extra ones.
pub fn golden_mismatches(files: &[(String, Vec<u8>)]) -> Vec<String> {
    let root = golden_dir();
    let mut expected = Vec::new();
    if root.exists() {
        collect(&root, &root, &mut expected);
    }
    expected.sort();
    let mut bad = Vec::new();
    for (name, bytes) in files {
        match expected.iter().find(|(n, _)| n == name) {
            Some((_, golden)) if golden == bytes => {}
            Some(_) => bad.push(format!("{name}: differs")),
            None => bad.push(format!("{name}: no golden copy")),
        }
    }
    for (name, _) in &expected {
        if !files.iter().any(|(n, _)| n == name) {
            bad.push(format!("{name}: not produced"));
        }
    }
    bad
}

pub fn write_golden(files: &[(String, Vec<u8>)]) {
    let root = golden_dir();
    if root.exists() {
        std::fs::remove_dir_all(&root).unwrap();
    }
    for (name, bytes) in files {
        let path = root.join(name);
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(path, bytes).unwrap();
    }
}
