//! Seeded, config-driven experiment runner for the causal misspecification
//! simulations.
//!
//! Each registered experiment turns a [`RunConfig`] into a [`Report`] of
//! tables and summary metrics; [`run_to_dir`] writes it as `report.json`,
//! one CSV per table, and `meta.json`.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
mod error;
pub mod experiments;
pub mod report;

pub use config::RunConfig;
pub use error::RunError;
pub use experiments::{find, Experiment, EXPERIMENTS};
pub use report::{Cell, Report, Table};

use std::path::{Path, PathBuf};

/// Run a registered experiment in memory.
pub fn run(name: &str, config: &RunConfig) -> Result<Report, RunError> {
    let exp = find(name)?;
    if let Some(named) = &config.experiment {
        if named != name {
            return Err(RunError::config(format!("config file is for `{named}`, not `{name}`")));
        }
    }
    (exp.run)(config)
}

/// Run a registered experiment and write its report files into `out`.
pub fn run_to_dir(name: &str, config: &RunConfig, out: &Path) -> Result<Vec<PathBuf>, RunError> {
    run(name, config)?.write_dir(out)
}
