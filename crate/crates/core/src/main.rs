use std::process::ExitCode;

use clap::Parser;
use nahm_core::cli::{run, Cli};

fn main() -> ExitCode {
    ExitCode::from(run(Cli::parse()))
}
