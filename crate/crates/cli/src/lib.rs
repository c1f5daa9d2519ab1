//! Batch front end for the reading-under-a-deadline laboratory: generate
//! instances, run Monte Carlo sweeps to CSV, and evaluate or maximize the
//! competitive-ratio bound.

pub mod commands;
pub mod config;
pub mod error;

pub use commands::{
    cmd_bound_eval, cmd_bound_grid, cmd_bound_maximize, cmd_generate, cmd_run, resolve_workers,
};
pub use config::{parse_config, ExperimentConfig, GeneratorSpec, InstanceSource, ReaderSpec};
pub use error::CliError;
