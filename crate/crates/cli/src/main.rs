//! `lapconv`: verification runs, explicit-formula comparisons and table dumps.
//!
//! Exit codes: 0 success, 1 failed check, 2 invalid input or precondition.

mod args;
mod run;

use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = args::Cli::parse();
    match run::run(&cli) {
        Ok(run::Outcome::Pass) => ExitCode::SUCCESS,
        Ok(run::Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("lapconv: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
