//! Experiment harness for `septensor-core`.
//!
//! Each experiment has a parameter struct read from a [`Config`], a `run`
//! function returning typed results, and a CSV rendering of those results.

pub mod config;
pub mod experiments;
pub mod table;
pub mod tensors;

use septensor_core::Error;
use thiserror::Error as ThisError;

pub use config::Config;
pub use experiments::Experiment;
pub use table::Table;

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Numerical(#[from] Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2 for configuration problems, 3 for numerical failures, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(e) => match e {
                Error::Config(_)
                | Error::InvalidInput(_)
                | Error::InvalidRank(_)
                | Error::Shape(_) => 2,
                _ => 3,
            },
            CliError::Io(_) => 1,
        }
    }
}
