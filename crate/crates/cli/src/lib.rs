//! The `rfeig` command line: pencil generators, the three eigensolver
//! modes, filter analysis and operation-count benchmarks.
//!
//! Exit codes: 0 converged, 2 not converged, 3 bad input, 4 numerical
//! failure such as a singular pole.

pub mod args;
pub mod commands;
pub mod config_file;
pub mod error;
pub mod manifest;
pub mod parse;

use std::ffi::OsString;

use clap::Parser;

use crate::args::{Cli, Command, GenCommand};
use crate::error::{CliResult, EXIT_INPUT};

pub use crate::manifest::RunManifest;

pub fn run<I>(args: I) -> i32
where
    I: IntoIterator<Item = OsString>,
{
    let args = match config_file::expand_config(args.into_iter().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: &Cli) -> CliResult<i32> {
    match &cli.command {
        Command::Gen(GenCommand::Powergrid(a)) => commands::gen_powergrid(a),
        Command::Gen(GenCommand::Spectrum(a)) => commands::gen_spectrum(a),
        Command::Solve(a) => commands::solve_cmd(a),
        Command::AnalyzeFilter(a) => commands::analyze_filter(a),
        Command::Bench(a) => commands::bench(a),
    }
}
