//! Experiment driver: configs, presets, the ground-state cache and the
//! pipeline stages behind the `qka` binary.

pub mod cache;
pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod manifest;
pub mod model;

pub use commands::Run;
pub use config::{ExperimentConfig, Preset};
pub use error::{CliError, Result};
