use std::io::Write;
use std::process::ExitCode;

use densitylab_cli::{configure_threads, run_args, Outcome, EXIT_USAGE};

fn main() -> ExitCode {
    let out = match configure_threads() {
        Ok(()) => run_args(std::env::args_os()),
        Err(m) => Outcome { code: EXIT_USAGE, stdout: String::new(), stderr: format!("error: {m}\n") },
    };
    // one write per stream
    let _ = std::io::stdout().lock().write_all(out.stdout.as_bytes());
    let _ = std::io::stderr().lock().write_all(out.stderr.as_bytes());
    ExitCode::from(out.code as u8)
}
