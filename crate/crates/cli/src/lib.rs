//! Command-line front end for `covering-core`: the on-disk prime cache,
//! line-based configuration, JSON/CSV reports and subcommand dispatch.
//!
//! Exit codes: 0 when every check passes, 1 when a mathematical check
//! fails (the report names it), 2 for invalid input, 3 when a resource cap
//! is hit.

pub mod cache;
pub mod commands;
pub mod config;
pub mod executor;
pub mod report;

use std::ffi::OsString;

pub use commands::run;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_CAP: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] covering_core::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(covering_core::Error::ResourceCap { .. }) => EXIT_CAP,
            CliError::Core(covering_core::Error::Inconclusive(_)) => EXIT_CHECK_FAILED,
            _ => EXIT_INVALID,
        }
    }
}

/// Entry point used by the binary: run and return the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut stdout = std::io::stdout();
    run(args, &mut stdout)
}
