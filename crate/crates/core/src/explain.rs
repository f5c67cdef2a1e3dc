//! Exact Shapley attribution by enumerating every feature coalition.
//!
//! The value of a coalition `S` is the interventional expectation
//! `v(S) = mean_b f(x_S, b_{-S})` over background rows `b`. All `2^F`
//! coalition values are computed once, then
//! `φ_j = Σ_{S ∌ j} |S|! (F-|S|-1)! / F! · (v(S ∪ {j}) − v(S))`.

use crate::dataset::DatasetError;
use crate::estimators::{FitKind, FitResult};
use crate::flexfit::{GbtModel, MlpModel, Model};
use crate::Dataset;
use serde::{Deserialize, Serialize};

/// Coalition enumeration is exponential; beyond this it is refused.
pub const MAX_FEATURES: usize = 12;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum ExplainError {
    #[error("{count} features exceed the exact-enumeration limit of {max}")]
    TooManyFeatures { count: usize, max: usize },
    #[error("background set is empty")]
    EmptyBackground,
    #[error("model reads no features")]
    NoFeatures,
    #[error("instance has {got} values but the model reads {expected} features")]
    InstanceArity { expected: usize, got: usize },
    #[error("`{0}` is not a model feature")]
    UnknownFeature(String),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
}

/// Anything that maps a row of named features to a number.
pub trait Predictor {
    fn features(&self) -> &[String];
    fn predict_row(&self, row: &[f64]) -> f64;
}

impl Predictor for MlpModel {
    fn features(&self) -> &[String] {
        &self.features
    }
    fn predict_row(&self, row: &[f64]) -> f64 {
        MlpModel::predict_row(self, row)
    }
}

impl Predictor for GbtModel {
    fn features(&self) -> &[String] {
        &self.features
    }
    fn predict_row(&self, row: &[f64]) -> f64 {
        GbtModel::predict_row(self, row)
    }
}

impl Predictor for Model {
    fn features(&self) -> &[String] {
        Model::features(self)
    }
    fn predict_row(&self, row: &[f64]) -> f64 {
        Model::predict_row(self, row)
    }
}

/// Fitted OLS or logistic regression; logistic fits predict probabilities.
impl Predictor for FitResult {
    fn features(&self) -> &[String] {
        self.regressors()
    }
    fn predict_row(&self, row: &[f64]) -> f64 {
        let m = self.linear_predictor(row);
        match self.kind {
            FitKind::Ols => m,
            FitKind::Logistic => crate::estimators::sigmoid(m),
        }
    }
}

/// Models with an additive pre-link score.
pub trait HasMargin {
    fn margin_row(&self, row: &[f64]) -> f64;
}

impl HasMargin for GbtModel {
    fn margin_row(&self, row: &[f64]) -> f64 {
        GbtModel::margin_row(self, row)
    }
}

impl HasMargin for MlpModel {
    fn margin_row(&self, row: &[f64]) -> f64 {
        MlpModel::margin_row(self, row)
    }
}

impl HasMargin for FitResult {
    fn margin_row(&self, row: &[f64]) -> f64 {
        self.linear_predictor(row)
    }
}

/// View a model through its margin (log-odds for classifiers), the scale on
/// which a logistic model is additive.
pub struct Margin<'a, M>(pub &'a M);

impl<M: Predictor + HasMargin> Predictor for Margin<'_, M> {
    fn features(&self) -> &[String] {
        self.0.features()
    }
    fn predict_row(&self, row: &[f64]) -> f64 {
        self.0.margin_row(row)
    }
}

/// Closure-backed predictor for ad-hoc functions.
pub struct FnPredictor<F> {
    pub features: Vec<String>,
    pub f: F,
}

impl<F: Fn(&[f64]) -> f64> FnPredictor<F> {
    pub fn new<S: Into<String>>(features: impl IntoIterator<Item = S>, f: F) -> Self {
        Self { features: features.into_iter().map(Into::into).collect(), f }
    }
}

impl<F: Fn(&[f64]) -> f64> Predictor for FnPredictor<F> {
    fn features(&self) -> &[String] {
        &self.features
    }
    fn predict_row(&self, row: &[f64]) -> f64 {
        (self.f)(row)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attribution {
    pub features: Vec<String>,
    pub phi: Vec<f64>,
    /// `v(∅)`: mean prediction over the background.
    pub base: f64,
    pub prediction: f64,
    /// `base + Σφ − prediction`.
    pub efficiency_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributionSummary {
    pub features: Vec<String>,
    pub mean_abs_phi: Vec<f64>,
    pub relevant: Vec<String>,
    pub irrelevant: Vec<String>,
    /// Σ of `mean_abs_phi` over irrelevant features.
    pub irrelevant_mass: f64,
    pub n_eval: usize,
    pub max_efficiency_residual: f64,
}

impl AttributionSummary {
    pub fn mean_abs(&self, feature: &str) -> Option<f64> {
        self.features.iter().position(|f| f == feature).map(|i| self.mean_abs_phi[i])
    }
}

fn check_features(count: usize) -> Result<(), ExplainError> {
    if count == 0 {
        return Err(ExplainError::NoFeatures);
    }
    if count > MAX_FEATURES {
        return Err(ExplainError::TooManyFeatures { count, max: MAX_FEATURES });
    }
    Ok(())
}

/// Coalition values `v[mask]` for one instance; bit `j` of `mask` set means
/// feature `j` takes the instance's value.
fn coalition_values<P: Predictor + ?Sized>(model: &P, instance: &[f64], background: &[f64]) -> Vec<f64> {
    let f = instance.len();
    let rows = background.len() / f;
    let mut hybrid = vec![0.0; f];
    (0..1usize << f)
        .map(|mask| {
            let mut total = 0.0;
            for r in 0..rows {
                let b = &background[r * f..(r + 1) * f];
                for j in 0..f {
                    hybrid[j] = if mask >> j & 1 == 1 { instance[j] } else { b[j] };
                }
                total += model.predict_row(&hybrid);
            }
            total / rows as f64
        })
        .collect()
}

/// Weighted sum over coalitions of marginal contributions.
fn shapley_from_values(v: &[f64], f: usize) -> Vec<f64> {
    // weight[s] = s! (f - s - 1)! / f!
    let weight: Vec<f64> = (0..f)
        .map(|s| {
            let mut w = 1.0 / f as f64;
            // 1 / (f · C(f-1, s))
            for i in 0..s {
                w *= (i + 1) as f64 / (f - 1 - i) as f64;
            }
            w
        })
        .collect();
    (0..f)
        .map(|j| {
            let bit = 1usize << j;
            (0..1usize << f).filter(|m| m & bit == 0).map(|m| weight[m.count_ones() as usize] * (v[m | bit] - v[m])).sum()
        })
        .collect()
}

/// Row-major matrix of the model's features; datasets always hold at least
/// one row, but the check keeps the contract explicit.
fn background_matrix(model_features: &[String], background: &Dataset) -> Result<Vec<f64>, ExplainError> {
    if background.n_rows() == 0 {
        return Err(ExplainError::EmptyBackground);
    }
    for f in model_features {
        if !background.contains(f) {
            return Err(ExplainError::UnknownFeature(f.clone()));
        }
    }
    Ok(background.row_major(model_features)?)
}

fn attribute<P: Predictor + ?Sized>(model: &P, instance: &[f64], bg: &[f64]) -> Attribution {
    let f = instance.len();
    let v = coalition_values(model, instance, bg);
    let phi = shapley_from_values(&v, f);
    let prediction = model.predict_row(instance);
    let base = v[0];
    let efficiency_residual = base + phi.iter().sum::<f64>() - prediction;
    Attribution { features: model.features().to_vec(), phi, base, prediction, efficiency_residual }
}

/// Shapley values of every model feature for one instance (given in the
/// model's feature order) against a background sample.
pub fn shapley_exact<P: Predictor + ?Sized>(model: &P, instance: &[f64], background: &Dataset) -> Result<Attribution, ExplainError> {
    let features = model.features();
    check_features(features.len())?;
    if instance.len() != features.len() {
        return Err(ExplainError::InstanceArity { expected: features.len(), got: instance.len() });
    }
    let bg = background_matrix(features, background)?;
    Ok(attribute(model, instance, &bg))
}

/// Mean |φ| per feature over every row of `eval`, and the total for features
/// outside `relevant`.
pub fn attribution_summary<P: Predictor + ?Sized, S: AsRef<str>>(
    model: &P,
    eval: &Dataset,
    background: &Dataset,
    relevant: &[S],
) -> Result<AttributionSummary, ExplainError> {
    let features = model.features().to_vec();
    check_features(features.len())?;
    for r in relevant {
        if !features.iter().any(|f| f == r.as_ref()) {
            return Err(ExplainError::UnknownFeature(r.as_ref().to_string()));
        }
    }
    let bg = background_matrix(&features, background)?;
    let f = features.len();
    let x = background_matrix(&features, eval)?;
    let n = eval.n_rows();
    let mut sums = vec![0.0; f];
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let a = attribute(model, &x[i * f..(i + 1) * f], &bg);
        for (s, p) in sums.iter_mut().zip(&a.phi) {
            *s += p.abs();
        }
        worst = worst.max(a.efficiency_residual.abs());
    }
    let mean_abs_phi: Vec<f64> = sums.iter().map(|s| s / n as f64).collect();
    let is_relevant = |name: &str| relevant.iter().any(|r| r.as_ref() == name);
    let irrelevant_mass = features.iter().zip(&mean_abs_phi).filter(|(n, _)| !is_relevant(n)).map(|(_, m)| m).sum();
    Ok(AttributionSummary {
        relevant: features.iter().filter(|n| is_relevant(n)).cloned().collect(),
        irrelevant: features.iter().filter(|n| !is_relevant(n)).cloned().collect(),
        features,
        mean_abs_phi,
        irrelevant_mass,
        n_eval: n,
        max_efficiency_residual: worst,
    })
}
