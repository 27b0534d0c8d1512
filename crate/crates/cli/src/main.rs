// SPDX-License-Identifier: MIT OR Apache-2.0

mod args;
mod commands;
mod config;
mod input;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};

pub const EXIT_ACCEPT: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
pub const EXIT_REJECT: u8 = 2;

fn run() -> anyhow::Result<u8> {
    let argv = config::expand(std::env::args().collect())?;
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            e.print()?;
            return Ok(EXIT_ACCEPT);
        }
        Err(e) => {
            e.print()?;
            return Ok(EXIT_ERROR);
        }
    };
    match cli.command {
        Command::Test(a) => commands::test(&a),
        Command::Segment(a) => commands::segment(&a),
        Command::Critval(a) => commands::critval(&a),
        Command::Efficiency(a) => commands::efficiency(&a),
        Command::Figures(a) => commands::figures(&a),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
