//! Acceptance criteria 1-12, one PASS/FAIL line each.

use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use satrans_cli::acceptance::Suite;
use satrans_cli::args::Level;

fn main() -> ExitCode {
    let mut suite = Suite::new(Level::Full);
    suite.binary = Some(PathBuf::from(env!("CARGO_BIN_EXE_satrans")));
    let stdout = io::stdout();
    match suite.run_all(None, &mut stdout.lock()) {
        Ok(true) => ExitCode::SUCCESS,
        _ => ExitCode::FAILURE,
    }
}
