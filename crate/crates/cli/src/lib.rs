//! Front end for `gentp`: configuration loading, subcommands and report
//! formats. `main.rs` only parses arguments and maps errors to exit codes.

pub mod commands;
pub mod config;
pub mod output;

use thiserror::Error;

/// Failures with a stable exit-code contract.
#[derive(Debug, Error)]
pub enum CliError {
    /// Exit code 2.
    #[error("{0}")]
    Input(String),
    /// Exit code 3.
    #[error("{0}")]
    NonConvergence(String),
    /// Exit code 4.
    #[error("{0}")]
    Precondition(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Io(_) => 2,
            CliError::NonConvergence(_) => 3,
            CliError::Precondition(_) => 4,
        }
    }
}

pub const EXIT_OK: i32 = 0;
/// `reproduce` found a row that does not match its reference value.
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NON_CONVERGENCE: i32 = 3;
pub const EXIT_PRECONDITION: i32 = 4;

/// What a subcommand produced: the primary document, where it goes, and
/// the exit status to report after writing it.
#[derive(Debug)]
pub struct Outcome {
    pub document: String,
    pub code: i32,
    pub warnings: Vec<String>,
}
