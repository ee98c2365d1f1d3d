//! Command-line front end for the logthh toolkit.

pub mod cli;
pub mod commands;
pub mod config;
pub mod report;

use std::fmt;

use logthh_core::error::ErrorClass;

pub use cli::{Cli, Command};
pub use config::{parse_config, Format, RunConfig};
pub use report::{Report, Table};

pub const EXIT_PASS: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_RESOURCE: u8 = 3;
pub const EXIT_CONSISTENCY: u8 = 4;

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "LOGTHH_THREADS";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: String) -> Self {
        CliError { code: EXIT_USAGE, message }
    }

    pub fn internal(message: String) -> Self {
        CliError { code: EXIT_CONSISTENCY, message }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<logthh_core::Error> for CliError {
    fn from(e: logthh_core::Error) -> Self {
        let code = match e.class() {
            ErrorClass::Usage => EXIT_USAGE,
            ErrorClass::Resource => EXIT_RESOURCE,
            ErrorClass::Consistency => EXIT_CONSISTENCY,
            ErrorClass::Failure => EXIT_FAIL,
        };
        CliError { code, message: e.to_string() }
    }
}

/// Parses the config file (if any), runs the command and renders it.
pub fn execute(cli: &Cli) -> Result<(Report, RunConfig), CliError> {
    let file = match &cli.common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
            parse_config(&text)?
        }
        None => Default::default(),
    };
    let cfg = RunConfig::resolve(&cli.common, &file)?;
    let report = commands::run(&cli.command, &cfg)?;
    Ok((report, cfg))
}

/// Exit code for a finished report.
pub fn exit_code(report: &Report) -> u8 {
    if report.verdict == Some(false) {
        EXIT_FAIL
    } else {
        EXIT_PASS
    }
}
