use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let exec = radflux_cli::run(std::env::args());
    // Written in one piece so a failure never leaves a partial report.
    let _ = std::io::stdout().lock().write_all(exec.stdout.as_bytes());
    let _ = std::io::stderr().lock().write_all(exec.stderr.as_bytes());
    ExitCode::from(exec.code as u8)
}
