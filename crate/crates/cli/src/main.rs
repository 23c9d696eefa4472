use std::process::ExitCode;

use clap::Parser;
use ircgain_cli::{run, Cli};

fn main() -> ExitCode {
    run(Cli::parse())
}
