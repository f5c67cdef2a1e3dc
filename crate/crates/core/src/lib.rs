//! Simulation and diagnostics for causal misspecification.
//!
//! - [`scm`]: structural causal models, sampling, graph surgery and
//!   closed-form moments for linear-Gaussian models.
//! - [`graph`]: DAG algorithms for identification (d-separation, backdoor
//!   paths, minimal adjustment sets).
//! - [`estimators`]: OLS, Pearson correlation, logistic regression and the
//!   KSG mutual-information estimator.
//! - [`flexfit`]: a small MLP, gradient-boosted trees, splitting and a
//!   stepwise-selection overfitting demonstration.
//! - [`explain`]: exact Shapley attribution by coalition enumeration.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dataset;
pub mod estimators;
pub mod explain;
pub mod flexfit;
pub mod graph;
mod linalg;
pub mod rng;
pub mod scm;

pub use dataset::{Dataset, DatasetError};
