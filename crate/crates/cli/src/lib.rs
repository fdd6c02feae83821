//! Experiment runner behind the `teleport-lab` binary.

pub mod config;
pub mod execute;

pub use config::{parse_config, Command, ConfigError, OutputFormat, RunConfig};
pub use execute::{execute, render, ExecError};
