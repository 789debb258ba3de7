#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

pub fn senselaw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_senselaw"))
        .args(args)
        .output()
        .expect("binary runs")
}

/// Runs the binary and panics with its stderr unless it exits 0.
pub fn senselaw_ok(args: &[&str]) {
    let out = senselaw(args);
    assert!(
        out.status.success(),
        "senselaw {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

pub fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

pub fn arg(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Synthetic corpus flags for a small, fast vocabulary.
pub const SMALL: [&str; 6] = ["--vocab", "400", "--tokens", "12000", "--dim", "16"];

/// Splits `word,frequency,polysemy,variance,specificity` rows.
pub fn word_rows(csv: &str) -> Vec<(String, usize, usize, f64, f64)> {
    csv.lines()
        .skip(1)
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            (
                f[0].to_owned(),
                f[1].parse().unwrap(),
                f[2].parse().unwrap(),
                f[3].parse().unwrap(),
                f[4].parse().unwrap(),
            )
        })
        .collect()
}
