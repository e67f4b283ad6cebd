//! Experiment harness for percolation on random recursive trees.
//!
//! Each `cmd_*` function runs seeded, replicate-parallel simulations and
//! returns a [`Report`]: tables of estimates (always with sample sizes and
//! standard errors) plus pass/fail checks against the limit theory.

pub mod commands;
pub mod config;
pub mod report;

pub use commands::{cmd_branching, cmd_largest, cmd_limit_laws, cmd_oracle, cmd_proportions};
pub use config::{ExperimentConfig, OutputFormat};
pub use report::{Cell, Check, Report, Table};

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] rrt_percolation::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
