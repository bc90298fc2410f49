//! IO, file formats and experiment orchestration for the `qpp` binary.

pub mod catalog;
pub mod config;
pub mod experiment;
pub mod formats;
pub mod roster;
pub mod stats_io;

use std::fmt;

/// Errors that map to exit codes: input problems exit 1, incomplete
/// experiment grids exit 2.
#[derive(Debug)]
pub enum CliError {
    Input(anyhow::Error),
    IncompleteGrid { missing: Vec<String> },
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(e) => write!(f, "{e:#}"),
            CliError::IncompleteGrid { missing } => {
                writeln!(f, "experiment grid is incomplete; {} missing cells:", missing.len())?;
                for cell in missing {
                    writeln!(f, "  {cell}")?;
                }
                Ok(())
            }
        }
    }
}

impl std::error::Error for CliError {}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Input(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::IncompleteGrid { .. } => 2,
        }
    }
}
