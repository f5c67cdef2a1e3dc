//! Classical estimators: OLS, Pearson correlation, logistic regression and
//! k-nearest-neighbour mutual information.
//!
//! Inference is homoskedastic throughout: OLS uses t-tests with `n - p - 1`
//! degrees of freedom and logistic regression uses Wald z-tests.

mod logistic;
mod mi;
mod ols;
mod pearson;

pub use logistic::logistic_fit;
pub(crate) use logistic::{sigmoid, softplus};
pub use mi::{mutual_information, mutual_information_ksg, MiResult, DEFAULT_NEIGHBORS};
pub use ols::ols_fit;
pub use pearson::{pearson, CorrResult};

use crate::dataset::DatasetError;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};
use std::io::Write;

/// Smallest singular value, relative to the largest, accepted as full rank.
pub const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum EstimateError {
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error("design matrix is rank deficient (singular value ratio {ratio:.3e})")]
    RankDeficient { ratio: f64 },
    #[error("need more than {needed} rows, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("column `{0}` has zero variance")]
    DegenerateColumn(String),
    #[error("logistic fit diverged: {0}")]
    Separation(String),
    #[error("target `{0}` is not binary 0/1")]
    NonBinaryTarget(String),
    #[error("column `{0}` contains non-finite values")]
    NonFinite(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitKind {
    Ols,
    Logistic,
}

/// Coefficients with inference. Index 0 is always the intercept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub kind: FitKind,
    pub target: String,
    pub terms: Vec<String>,
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    /// t statistics for OLS, z statistics for logistic regression.
    pub statistics: Vec<f64>,
    pub p_values: Vec<f64>,
    /// OLS residual variance `SSE / (n - p - 1)`; fixed at 1 (binomial dispersion) for logistic fits.
    pub residual_variance: f64,
    pub r_squared: Option<f64>,
    pub log_likelihood: Option<f64>,
    pub n_used: usize,
}

pub const INTERCEPT: &str = "intercept";

/// CSV column order for [`FitResult::write_csv`].
pub const FIT_CSV_HEADER: [&str; 8] = ["target", "term", "estimate", "std_error", "statistic", "p_value", "residual_variance", "n_used"];

impl FitResult {
    fn position(&self, term: &str) -> Option<usize> {
        self.terms.iter().position(|t| t == term)
    }

    pub fn coefficient(&self, term: &str) -> Option<f64> {
        self.position(term).map(|i| self.coefficients[i])
    }

    pub fn std_error(&self, term: &str) -> Option<f64> {
        self.position(term).map(|i| self.std_errors[i])
    }

    pub fn p_value(&self, term: &str) -> Option<f64> {
        self.position(term).map(|i| self.p_values[i])
    }

    pub fn intercept(&self) -> f64 {
        self.coefficients[0]
    }

    /// Regressor names, intercept excluded.
    pub fn regressors(&self) -> &[String] {
        &self.terms[1..]
    }

    /// Linear predictor `intercept + Σ β x` for one row of regressor values.
    pub fn linear_predictor(&self, row: &[f64]) -> f64 {
        self.coefficients[0] + self.coefficients[1..].iter().zip(row).map(|(b, x)| b * x).sum::<f64>()
    }

    /// One CSV row per term, header included.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(FIT_CSV_HEADER)?;
        for i in 0..self.terms.len() {
            w.write_record([
                self.target.clone(),
                self.terms[i].clone(),
                self.coefficients[i].to_string(),
                self.std_errors[i].to_string(),
                self.statistics[i].to_string(),
                self.p_values[i].to_string(),
                self.residual_variance.to_string(),
                self.n_used.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub(crate) fn two_sided_t(stat: f64, df: f64) -> f64 {
    if stat.is_nan() {
        return 1.0;
    }
    if stat.is_infinite() {
        return 0.0;
    }
    let t = StudentsT::new(0.0, 1.0, df).expect("df > 0");
    (2.0 * t.sf(stat.abs())).clamp(0.0, 1.0)
}

pub(crate) fn two_sided_normal(stat: f64) -> f64 {
    if stat.is_nan() {
        return 1.0;
    }
    let n = Normal::new(0.0, 1.0).expect("unit normal");
    (2.0 * n.sf(stat.abs())).clamp(0.0, 1.0)
}

/// `estimate / se`, with `0/0` mapped to NaN (p = 1) and `x/0` to ±∞ (p = 0).
pub(crate) fn ratio(estimate: f64, se: f64) -> f64 {
    if se > 0.0 {
        estimate / se
    } else if estimate == 0.0 {
        f64::NAN
    } else {
        estimate.signum() * f64::INFINITY
    }
}

pub(crate) fn finite_column<'a>(data: &'a crate::Dataset, name: &str) -> Result<&'a [f64], EstimateError> {
    let c = data.column(name)?;
    if c.iter().any(|v| !v.is_finite()) {
        return Err(EstimateError::NonFinite(name.to_string()));
    }
    Ok(c)
}
