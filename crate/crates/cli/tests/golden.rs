//! Golden reports. Set `RADFLUX_UPDATE_GOLDEN=1` to rewrite the expected
//! files after an intended change.

mod common;

use common::*;

#[test]
fn golden_reports_match() {
    let update = std::env::var("RADFLUX_UPDATE_GOLDEN").is_ok_and(|v| v == "1");
    let mut failures = Vec::new();
    for case in cases() {
        let out = run_binary(&case.args, None);
        if out.code != case.code {
            failures.push(format!(
                "{}: exit {} (expected {})\n{}",
                case.name, out.code, case.code, out.stderr
            ));
            continue;
        }
        if case.code == 2 {
            if !out.stdout.is_empty() {
                failures.push(format!("{}: input error wrote to stdout", case.name));
            }
            if out.stderr.is_empty() {
                failures.push(format!("{}: input error without a diagnostic", case.name));
            }
        }
        let path = expected_path(&case.name);
        if update {
            std::fs::write(&path, &out.stdout).unwrap();
        } else if read(&path) != out.stdout {
            failures.push(format!("{}: report differs from {}", case.name, path.display()));
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    assert_eq!(run_suite(Some(1)), run_suite(Some(4)));
}

#[test]
fn invalid_thread_setting_is_an_input_error() {
    let args: Vec<String> = cases()[0].args.clone();
    let mut cmd = std::process::Command::new(env!("CARGO_BIN_EXE_radflux"));
    let out = cmd
        .args(&args)
        .current_dir(crate_root())
        .env("RADFLUX_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}
