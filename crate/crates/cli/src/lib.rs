//! The `qis` command-line front end.
//!
//! Exit codes: 0 success, 1 internal, 2 usage, 3 validation, 4 convergence,
//! 5 I/O. Failures print `{"error": {"kind", "code", "message"}}` on stderr.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::ffi::OsString;

use clap::error::ErrorKind;
use clap::Parser;

pub use commands::{
    generate, sweep_rows, verify_records, AlgebraFile, ReportRecord, ReportRow, SpectrumFile,
    StateFile, StateRecord, SweepFile, VerifyFile,
};
pub use config::{Command, Format, RunConfig};
pub use error::CliError;
pub use output::Artifact;

/// Computes the artifact for `config` without writing it.
pub fn execute(config: &RunConfig) -> Result<Artifact, CliError> {
    match &config.command {
        Command::Gen(a) => commands::gen(a),
        Command::Verify(a) => commands::verify_cmd(a),
        Command::Spectrum(a) => commands::spectrum(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::AlgebraCheck(a) => commands::algebra_check(a),
    }
}

pub fn parse<I, T>(args: I) -> Result<RunConfig, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    RunConfig::try_parse_from(args)
}

/// Parses, runs and writes; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match parse(args) {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return 0;
        }
        Err(e) => {
            let err = CliError::Usage(e.render().to_string().trim_end().to_string());
            eprintln!("{}", err.to_json());
            return err.exit_code();
        }
    };
    match execute(&config).and_then(|a| a.write()) {
        Ok(_) => 0,
        Err(err) => {
            eprintln!("{}", err.to_json());
            err.exit_code()
        }
    }
}
