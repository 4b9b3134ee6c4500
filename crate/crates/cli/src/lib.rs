//! Command-line front end for `epr-core`: configuration, sweeps and
//! CSV/JSON output.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fmt;

pub mod angle;
pub mod config;
pub mod output;
pub mod runner;

pub use config::{ConfigDoc, ExperimentKind, RunConfig};
pub use output::OutputTable;
pub use runner::run;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Bad configuration or flags; exit code 2.
    Config(String),
    /// The computation has no meaningful normalization; exit code 3.
    Degenerate(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Degenerate(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Degenerate(m) => write!(f, "degenerate computation: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}
