//! Command-line front end for `satrans-core`.

pub mod acceptance;
pub mod args;
pub mod commands;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use commands::{Ctx, Failure, EXIT_FAILURE, EXIT_OK};

/// Parses `argv`, runs the command and returns the process exit status.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{}", e.render());
                    EXIT_FAILURE
                }
            };
        }
    };
    let mut file;
    let out: &mut dyn Write = match &cli.output {
        Some(path) => match File::create(path) {
            Ok(f) => {
                file = BufWriter::new(f);
                &mut file
            }
            Err(e) => {
                let _ = writeln!(stderr, "error: cannot create {}: {e}", path.display());
                return EXIT_FAILURE;
            }
        },
        None => stdout,
    };
    let mut ctx = Ctx { out, err: stderr, budget: cli.budget };
    let result = dispatch(&mut ctx, &cli.command).and_then(|()| ctx.out.flush().map_err(Failure::from));
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(ctx.err, "error: {f}");
            f.exit_code()
        }
    }
}

fn dispatch(ctx: &mut Ctx<'_>, command: &Command) -> commands::Outcome {
    match command {
        Command::Count(a) => commands::count(ctx, a),
        Command::Enumerate(a) => commands::enumerate(ctx, a),
        Command::Verify(a) => commands::verify(ctx, a),
        Command::Realize(a) => commands::realize_cmd(ctx, a),
        Command::Selftest(a) => {
            if let Some(id) = a.only {
                if !acceptance::CRITERIA.iter().any(|(i, _)| *i == id) {
                    return Err(Failure::Invalid(format!("no criterion {id}; use 1 to 12")));
                }
            }
            let mut suite = acceptance::Suite::new(a.level);
            suite.binary = std::env::current_exe().ok();
            if suite.run_all(a.only, ctx.out)? {
                Ok(())
            } else {
                Err(Failure::Invalid("acceptance suite failed".into()))
            }
        }
    }
}

/// Entry point used by the binary.
pub fn main_with_std() -> i32 {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let mut err = io::stderr();
    run(std::env::args_os(), &mut out, &mut err)
}
