//! Experiment orchestration for the finite-interval KdV laboratory:
//! configuration parsing, named data families, experiment dispatch, CSV
//! and JSON emission, run manifests, and parameter sweeps.
//!
//! Every experiment is reproducible: all randomness flows from the
//! config seed through one named generator, floating-point output is
//! serialized at 17 significant digits, and re-running a config yields
//! byte-identical CSV files.

pub mod config;
pub mod data;
pub mod experiments;
pub mod manifest;
pub mod report;
pub mod sweep;

use std::path::PathBuf;

pub use config::{Experiment, ExperimentConfig};
pub use experiments::{run_experiment, ExperimentOutcome};

/// Process exit codes of the CLI.
pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("numerical fault: {0}")]
    Numerical(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization: {0}")]
    Serde(String),
}

impl LabError {
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Config(_) => EXIT_VALIDATION,
            LabError::Numerical(_) => EXIT_NUMERICAL,
            LabError::Io(_) | LabError::Serde(_) => EXIT_NUMERICAL,
        }
    }
}

impl From<kdv_core::Error> for LabError {
    fn from(e: kdv_core::Error) -> Self {
        match e {
            kdv_core::Error::InvalidConfig(msg) => LabError::Config(msg.to_string()),
            other => LabError::Numerical(other.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, LabError>;

/// Resolved output location of a run.
pub fn run_dir(base: &std::path::Path, experiment: Experiment) -> PathBuf {
    base.join(experiment.name())
}
