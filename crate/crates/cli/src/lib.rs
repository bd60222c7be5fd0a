//! Library side of the `gasgiant-tomo` command: configuration, suite runners
//! and artifact output.

pub mod config;
pub mod output;
pub mod run;

pub use config::{ConfigError, ExperimentConfig, ModelSpec, Thresholds};
pub use output::{ArtifactDir, CriterionResult, Relation};
pub use run::{Context, RunError, Suite};
