//! Experiment harness around the `phaselaw` library: configuration,
//! commands and checksummed output directories.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use config::{parse_seeds, ExperimentConfig};
pub use error::CliError;
pub use output::{Outputs, RunManifest};
