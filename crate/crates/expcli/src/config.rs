//! Run configuration: seed, sample size and experiment parameters, read from
//! an optional TOML file and overridden by command-line flags.

use crate::RunError;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Smallest sample size any experiment accepts.
pub const MIN_N: usize = 10;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// When present, must name the experiment being run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<String>,
    #[serde(default)]
    pub seed: u64,
    /// Sample size; `None` selects the experiment default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Experiment-specific parameters.
    #[serde(default)]
    pub params: toml::Table,
}

impl RunConfig {
    pub fn new(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = Some(n);
        self
    }

    pub fn with_param(mut self, key: &str, value: impl Into<toml::Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn from_toml_str(text: &str) -> Result<Self, RunError> {
        toml::from_str(text).map_err(|e| RunError::config(e.message().to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self, RunError> {
        let text = std::fs::read_to_string(path).map_err(|e| RunError::io(path, e))?;
        Self::from_toml_str(&text)
    }

    /// Sample size after applying the default and the lower bound.
    pub fn resolve_n(&self, default: usize) -> Result<usize, RunError> {
        let n = self.n.unwrap_or(default);
        if n < MIN_N {
            return Err(RunError::config(format!("n = {n}; must be at least {MIN_N}")));
        }
        Ok(n)
    }

    /// Decode `params` into an experiment's parameter struct; absent keys take
    /// their defaults and unknown keys are rejected.
    pub fn params<P: DeserializeOwned>(&self) -> Result<P, RunError> {
        toml::Value::Table(self.params.clone()).try_into().map_err(|e: toml::de::Error| RunError::config(e.message().to_string()))
    }
}
