//! Configuration-driven experiment runner behind the `qns` binary.
//!
//! Every experiment first turns its configuration into a validated plan (all
//! parameters checked against the library preconditions), then runs it and
//! collects CSV, JSON and SVG artifacts in memory.

pub mod config;
mod experiments;
pub mod output;

use std::fmt;

pub use config::{Experiment, ExperimentConfig};
pub use output::{Artifacts, Provenance};

use crate::error::QnsError;

#[derive(Debug)]
pub enum HarnessError {
    /// Bad configuration or parameters, detected before any computation.
    Validation(QnsError),
    /// Failure while running or writing results.
    Runtime(QnsError),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Validation(_) => 2,
            HarnessError::Runtime(_) => 3,
        }
    }
}

impl fmt::Display for HarnessError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HarnessError::Validation(e) => write!(f, "invalid configuration: {e}"),
            HarnessError::Runtime(e) => write!(f, "run failed: {e}"),
        }
    }
}

impl std::error::Error for HarnessError {}

/// Validates and runs the configured experiment, returning its artifacts unwritten.
pub fn run_pipeline(config: &ExperimentConfig) -> Result<Artifacts, HarnessError> {
    let plan = experiments::Plan::from_config(config).map_err(HarnessError::Validation)?;
    let prov = Provenance {
        experiment: config.experiment.name().to_string(),
        seed: config.seed().map_err(HarnessError::Validation)?,
        config_hash: config.hash(),
    };
    let mut art = plan.run(&prov).map_err(HarnessError::Runtime)?;
    art.text("config.txt", config.canonical());
    Ok(art)
}
