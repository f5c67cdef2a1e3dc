//! Exogenous predictors feeding one outcome: OLS should recover the
//! structural weights, with `x0 := 1` playing the intercept.

use super::check_finite;
use crate::{row, Report, RunConfig, RunError, Table};
use causalsim::estimators::{ols_fit, INTERCEPT};
use causalsim::scm::presets::exogenous_predictors;
use serde::{Deserialize, Serialize};
use serde_json::json;
use statrs::distribution::{ContinuousCDF, StudentsT};

pub const DEFAULT_N: usize = 5000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Params {
    /// Structural weights `θ0..θK-1`; `θ0` multiplies the constant node.
    pub theta: Vec<f64>,
    /// Two-sided confidence level of the reported intervals.
    pub confidence: f64,
}

impl Default for Params {
    fn default() -> Self {
        Self { theta: vec![3.3, 0.1, 0.3, 0.5], confidence: 0.95 }
    }
}

pub fn run(config: &RunConfig) -> Result<Report, RunError> {
    let n = config.resolve_n(DEFAULT_N)?;
    let p: Params = config.params()?;
    if p.theta.len() < 2 {
        return Err(RunError::config("theta needs an intercept weight and at least one slope"));
    }
    check_finite("theta", &p.theta)?;
    if !(p.confidence > 0.0 && p.confidence < 1.0) {
        return Err(RunError::config("confidence must lie in (0, 1)"));
    }
    if n <= p.theta.len() {
        return Err(RunError::config(format!("n = {n} leaves no residual degrees of freedom")));
    }

    let data = exogenous_predictors(&p.theta).sample(n, config.seed)?;
    let regressors: Vec<String> = (1..p.theta.len()).map(|k| format!("x{k}")).collect();
    let fit = ols_fit(&data, "y", &regressors)?;
    let df = (n - p.theta.len()) as f64;
    let t_crit = StudentsT::new(0.0, 1.0, df).expect("positive df").inverse_cdf(0.5 + p.confidence / 2.0);

    let mut table = Table::new(
        "coefficients",
        &["node", "term", "true_value", "estimate", "std_error", "t_statistic", "p_value", "ci_low", "ci_high", "abs_error"],
    );
    let mut max_err: f64 = 0.0;
    let mut covered = 0;
    for (k, &truth) in p.theta.iter().enumerate() {
        let term = if k == 0 { INTERCEPT.to_string() } else { format!("x{k}") };
        let i = fit.terms.iter().position(|t| *t == term).expect("every term is fitted");
        let (est, se) = (fit.coefficients[i], fit.std_errors[i]);
        let (lo, hi) = (est - t_crit * se, est + t_crit * se);
        covered += usize::from(lo <= truth && truth <= hi);
        max_err = max_err.max((est - truth).abs());
        table.push(row![format!("x{k}"), term, truth, est, se, fit.statistics[i], fit.p_values[i], lo, hi, (est - truth).abs()]);
    }

    let mut report = Report::new("table2", config, n, &p);
    report.note("x0 is the constant node, so its weight is estimated as the regression intercept");
    report.note(format!("intervals use Student t with {df} degrees of freedom"));
    report.summary = json!({
        "max_abs_error": max_err,
        "intervals_covering_truth": covered,
        "residual_variance": fit.residual_variance,
        "r_squared": fit.r_squared,
        "n_used": fit.n_used,
    });
    report.tables.push(table);
    Ok(report)
}
