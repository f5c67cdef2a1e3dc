//! Flexible learners and validation machinery: a feed-forward network trained
//! by full-batch gradient descent, first-order gradient-boosted trees,
//! seeded train/test and k-fold splits, and greedy forward selection.
//!
//! Models serialize to JSON (`serde_json`) with the schema documented on
//! [`MlpModel`] and [`GbtModel`].

mod gbt;
mod mlp;
mod split;
mod stepwise;

pub use gbt::{gbt_train, GbtConfig, GbtModel, Loss, Tree, TreeNode};
pub use mlp::{mlp_train, Activation, Layer, MlpConfig, MlpModel, OutputKind};
pub use split::{holdout, k_fold, SplitPlan};
pub use stepwise::{stepwise_forward, StepRecord, StepwiseConfig, StepwiseTrace};

use crate::dataset::DatasetError;
use crate::estimators::EstimateError;
use crate::Dataset;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum FlexError {
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Estimate(#[from] EstimateError),
    #[error("need at least {needed} rows or items, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("training diverged at epoch {epoch}: loss {loss:e} exceeds 1e6 x initial {initial:e}")]
    Divergence { epoch: usize, loss: f64, initial: f64 },
    #[error("target `{0}` has no variation")]
    DegenerateTarget(String),
    #[error("target `{0}` is not binary 0/1")]
    NonBinaryTarget(String),
    #[error("model feature `{0}` is missing from the data")]
    MissingFeature(String),
    #[error("non-finite value in column `{0}`")]
    NonFinite(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("model JSON: {0}")]
    Json(String),
}

/// A trained model of either family, as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Model {
    Mlp(MlpModel),
    Gbt(GbtModel),
}

impl Model {
    pub fn features(&self) -> &[String] {
        match self {
            Model::Mlp(m) => &m.features,
            Model::Gbt(m) => &m.features,
        }
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        match self {
            Model::Mlp(m) => m.predict_row(row),
            Model::Gbt(m) => m.predict_row(row),
        }
    }

    pub fn to_json(&self) -> Result<String, FlexError> {
        serde_json::to_string_pretty(self).map_err(|e| FlexError::Json(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self, FlexError> {
        serde_json::from_str(text).map_err(|e| FlexError::Json(e.to_string()))
    }
}

impl From<MlpModel> for Model {
    fn from(m: MlpModel) -> Self {
        Model::Mlp(m)
    }
}

impl From<GbtModel> for Model {
    fn from(m: GbtModel) -> Self {
        Model::Gbt(m)
    }
}

/// Evaluate a model on every row. Logistic-output models return
/// probabilities in (0, 1).
pub fn predict(model: &Model, data: &Dataset) -> Result<Vec<f64>, FlexError> {
    let x = feature_matrix(data, model.features())?;
    let d = model.features().len();
    Ok((0..data.n_rows()).map(|i| model.predict_row(&x[i * d..(i + 1) * d])).collect())
}

/// Row-major feature matrix, reporting absent columns as missing features.
pub(crate) fn feature_matrix<S: AsRef<str>>(data: &Dataset, features: &[S]) -> Result<Vec<f64>, FlexError> {
    for f in features {
        if !data.contains(f.as_ref()) {
            return Err(FlexError::MissingFeature(f.as_ref().to_string()));
        }
    }
    let x = data.row_major(features)?;
    if let Some(pos) = x.iter().position(|v| !v.is_finite()) {
        return Err(FlexError::NonFinite(features[pos % features.len()].as_ref().to_string()));
    }
    Ok(x)
}

pub(crate) fn target_column<'a>(data: &'a Dataset, target: &str) -> Result<&'a [f64], FlexError> {
    let y = data.column(target)?;
    if y.iter().any(|v| !v.is_finite()) {
        return Err(FlexError::NonFinite(target.to_string()));
    }
    Ok(y)
}

pub(crate) fn check_binary(y: &[f64], target: &str) -> Result<(), FlexError> {
    if y.iter().any(|&v| v != 0.0 && v != 1.0) {
        return Err(FlexError::NonBinaryTarget(target.to_string()));
    }
    Ok(())
}

/// Mean squared error.
pub fn mse(y: &[f64], pred: &[f64]) -> f64 {
    y.iter().zip(pred).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / y.len() as f64
}

/// Mean binary cross-entropy in nats; probabilities are clipped to
/// `[1e-15, 1 - 1e-15]`.
pub fn log_loss(y: &[f64], prob: &[f64]) -> f64 {
    y.iter()
        .zip(prob)
        .map(|(&t, &p)| {
            let p = p.clamp(1e-15, 1.0 - 1e-15);
            -(t * p.ln() + (1.0 - t) * (1.0 - p).ln())
        })
        .sum::<f64>()
        / y.len() as f64
}

/// `1 - SSE / SST` with SST about the mean of `y` itself; negative when the
/// predictions are worse than that mean.
pub fn r_squared(y: &[f64], pred: &[f64]) -> f64 {
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let sst: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let sse: f64 = y.iter().zip(pred).map(|(a, b)| (a - b).powi(2)).sum();
    1.0 - sse / sst
}
