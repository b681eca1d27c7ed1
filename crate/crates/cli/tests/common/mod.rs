#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

pub struct Case {
    pub name: String,
    pub code: i32,
    pub args: Vec<String>,
}

pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn crate_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn golden_dir() -> PathBuf {
    crate_root().join("tests").join("golden")
}

pub fn cases() -> Vec<Case> {
    let text = std::fs::read_to_string(golden_dir().join("cases.txt")).expect("cases.txt");
    text.lines()
        .filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|l| {
            let parts: Vec<&str> = l.split('|').map(str::trim).collect();
            assert_eq!(parts.len(), 3, "malformed case line: {l}");
            Case {
                name: parts[0].to_string(),
                code: parts[1].parse().expect("exit code"),
                args: parts[2].split_whitespace().map(String::from).collect(),
            }
        })
        .collect()
}

/// Runs the installed binary from the crate root.
pub fn run_binary(args: &[String], threads: Option<usize>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_radflux"));
    cmd.args(args).current_dir(crate_root());
    match threads {
        Some(n) => {
            cmd.env("RADFLUX_THREADS", n.to_string());
        }
        None => {
            cmd.env_remove("RADFLUX_THREADS");
        }
    }
    let out = cmd.output().expect("spawn radflux");
    Output {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).expect("utf-8 stdout"),
        stderr: String::from_utf8(out.stderr).expect("utf-8 stderr"),
    }
}

pub fn expected_path(name: &str) -> PathBuf {
    golden_dir().join("expected").join(format!("{name}.out"))
}

/// Stdout of every golden case, concatenated with case headers.
pub fn run_suite(threads: Option<usize>) -> String {
    let mut all = String::new();
    for case in cases() {
        let out = run_binary(&case.args, threads);
        all.push_str(&format!("== {} (exit {})\n", case.name, out.code));
        all.push_str(&out.stdout);
    }
    all
}

pub fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_default()
}
