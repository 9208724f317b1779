//! Experiment orchestration on top of `symwave`: configuration ingestion,
//! CSV emission, the figure datasets, and the validation suite.

use std::fmt;

pub mod config;
pub mod criteria;
pub mod experiments;
pub mod table;

pub use config::{ExperimentConfig, ExperimentKind, FigureId};
pub use criteria::{run_all_criteria, run_criterion, smoke_row, CriterionOutcome, CRITERION_COUNT};
pub use experiments::{
    run_experiment, run_figure, run_mc, run_moments, run_series, run_validation,
    run_waveguide_suite,
};
pub use table::{Column, ColumnData, ResultTable};

/// Failure classes of the runner, in one-to-one correspondence with the
/// process exit codes (success is 0).
#[derive(Debug)]
pub enum CliError {
    /// A criterion of the validation suite failed. Exit code 1.
    Validation(String),
    /// Bad configuration: unknown keys, out-of-range values, unreadable
    /// files. Exit code 2.
    Config(String),
    /// A numerical routine failed to converge or hit a guard. Exit code 3.
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(s) => write!(f, "validation failed: {s}"),
            CliError::Config(s) => write!(f, "configuration error: {s}"),
            CliError::Numerical(s) => write!(f, "numerical failure: {s}"),
        }
    }
}

impl std::error::Error for CliError {}

// Invalid parameters handed to the library trace back to the user's
// configuration; everything else is a genuine numerical failure.
impl From<symwave::Error> for CliError {
    fn from(e: symwave::Error) -> Self {
        match e {
            symwave::Error::InvalidInput(_) => CliError::Config(e.to_string()),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
