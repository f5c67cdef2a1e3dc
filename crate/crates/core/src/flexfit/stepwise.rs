//! Greedy forward selection scored on the training rows, with every step
//! re-scored on held-out rows to expose selection-driven overfitting.

use super::{r_squared, target_column, FlexError, SplitPlan};
use crate::estimators::{ols_fit, EstimateError};
use crate::Dataset;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StepwiseConfig {
    /// Partial F statistic a candidate must reach to enter; `inf` admits none.
    pub f_to_enter: f64,
    /// Upper bound on selected variables.
    pub max_steps: Option<usize>,
}

impl Default for StepwiseConfig {
    fn default() -> Self {
        Self { f_to_enter: 4.0, max_steps: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub added: String,
    pub f_statistic: f64,
    pub in_sample_r2: f64,
    pub held_out_r2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepwiseTrace {
    pub target: String,
    pub n_train: usize,
    pub n_test: usize,
    pub steps: Vec<StepRecord>,
}

impl StepwiseTrace {
    pub fn selected(&self) -> Vec<&str> {
        self.steps.iter().map(|s| s.added.as_str()).collect()
    }

    /// In-sample and held-out R² of the final model (0, 0 when empty).
    pub fn final_r2(&self) -> (f64, f64) {
        self.steps.last().map_or((0.0, 0.0), |s| (s.in_sample_r2, s.held_out_r2))
    }
}

/// Add, one at a time, the candidate that most increases training R², until
/// the best addition's partial F falls below `f_to_enter`.
pub fn stepwise_forward<S: AsRef<str>>(
    data: &Dataset,
    target: &str,
    candidates: &[S],
    plan: &SplitPlan,
    config: &StepwiseConfig,
) -> Result<StepwiseTrace, FlexError> {
    if candidates.len() < 2 {
        return Err(FlexError::InsufficientData { needed: 2, got: candidates.len() });
    }
    if plan.train.len() < 3 || plan.test.len() < 2 {
        return Err(FlexError::InsufficientData { needed: 3, got: plan.train.len().min(plan.test.len()) });
    }
    target_column(data, target)?;
    let train = data.select_rows(&plan.train)?;
    let test = data.select_rows(&plan.test)?;
    let y_train = train.column(target)?;
    let y_test = test.column(target)?;
    let n = plan.train.len();
    let mean = y_train.iter().sum::<f64>() / n as f64;
    let mut sse_current: f64 = y_train.iter().map(|v| (v - mean).powi(2)).sum();

    let mut remaining: Vec<String> = candidates.iter().map(|c| c.as_ref().to_string()).collect();
    let mut selected: Vec<String> = Vec::new();
    let mut steps = Vec::new();
    let limit = config.max_steps.unwrap_or(usize::MAX).min(n.saturating_sub(2));
    while !remaining.is_empty() && selected.len() < limit {
        let mut best: Option<(usize, f64, crate::estimators::FitResult)> = None;
        for (ci, c) in remaining.iter().enumerate() {
            let mut regs = selected.clone();
            regs.push(c.clone());
            let fit = match ols_fit(&train, target, &regs) {
                Ok(f) => f,
                Err(EstimateError::RankDeficient { .. } | EstimateError::InsufficientData { .. }) => continue,
                Err(e) => return Err(e.into()),
            };
            let df = (n - regs.len() - 1) as f64;
            let sse = fit.residual_variance * df;
            if best.as_ref().is_none_or(|(_, s, _)| sse < *s) {
                best = Some((ci, sse, fit));
            }
        }
        let Some((ci, sse, fit)) = best else { break };
        let df = (n - selected.len() - 2) as f64;
        let f_stat = if sse > 0.0 { (sse_current - sse) / (sse / df) } else { f64::INFINITY };
        if !(f_stat >= config.f_to_enter) || config.f_to_enter == f64::INFINITY {
            break;
        }
        let added = remaining.remove(ci);
        selected.push(added.clone());
        sse_current = sse;
        let in_sample = r_squared(y_train, &fitted(&fit, &train, &selected)?);
        let held_out = r_squared(y_test, &fitted(&fit, &test, &selected)?);
        steps.push(StepRecord { step: selected.len(), added, f_statistic: f_stat, in_sample_r2: in_sample, held_out_r2: held_out });
    }
    Ok(StepwiseTrace { target: target.to_string(), n_train: n, n_test: plan.test.len(), steps })
}

fn fitted(fit: &crate::estimators::FitResult, data: &Dataset, regs: &[String]) -> Result<Vec<f64>, FlexError> {
    let x = data.row_major(regs)?;
    let d = regs.len();
    Ok((0..data.n_rows()).map(|i| fit.linear_predictor(&x[i * d..(i + 1) * d])).collect())
}
