//! Registry of named experiments and helpers they share.

mod backdoor_report;
pub mod fig2_panels;
pub mod fig3_fit;
pub mod fig5_sweep;
mod overfit_demo;
pub mod part2_regressions;
mod table2;
mod table3;

use crate::{Report, RunConfig, RunError};

pub struct Experiment {
    pub name: &'static str,
    pub description: &'static str,
    pub default_n: usize,
    pub run: fn(&RunConfig) -> Result<Report, RunError>,
}

pub const EXPERIMENTS: &[Experiment] = &[
    Experiment {
        name: "table2",
        description: "exogenous predictors: OLS recovery of the structural weights",
        default_n: table2::DEFAULT_N,
        run: table2::run,
    },
    Experiment {
        name: "table3",
        description: "nine-node model: Pearson r of every predictor with y against population values",
        default_n: table3::DEFAULT_N,
        run: table3::run,
    },
    Experiment {
        name: "part2_regressions",
        description: "naive, all-variable, mediator and backdoor regressions of y on x0 with analytic oracles",
        default_n: part2_regressions::DEFAULT_N,
        run: part2_regressions::run,
    },
    Experiment {
        name: "backdoor_report",
        description: "backdoor paths and adjustment sets for x0 -> y, plus a hidden-confounder graph",
        default_n: backdoor_report::DEFAULT_N,
        run: backdoor_report::run,
    },
    Experiment {
        name: "fig2_panels",
        description: "Pearson r versus k-NN mutual information on linear and non-linear panels",
        default_n: fig2_panels::DEFAULT_N,
        run: fig2_panels::run,
    },
    Experiment {
        name: "fig3_fit",
        description: "linear regression versus a small neural network on a sinusoid over a trend",
        default_n: fig3_fit::DEFAULT_N,
        run: fig3_fit::run,
    },
    Experiment {
        name: "fig5_sweep",
        description: "logistic regression versus boosted trees as the outcome becomes non-linear",
        default_n: fig5_sweep::DEFAULT_N,
        run: fig5_sweep::run,
    },
    Experiment {
        name: "overfit_demo",
        description: "forward stepwise selection on pure noise: in-sample versus held-out R²",
        default_n: overfit_demo::DEFAULT_N,
        run: overfit_demo::run,
    },
];

pub fn find(name: &str) -> Result<&'static Experiment, RunError> {
    EXPERIMENTS.iter().find(|e| e.name == name).ok_or_else(|| RunError::UnknownExperiment {
        name: name.to_string(),
        known: EXPERIMENTS.iter().map(|e| e.name.to_string()).collect(),
    })
}

/// Spearman rank correlation (average ranks for ties); NaN when either side
/// is constant.
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let (ra, rb) = (ranks(a), ranks(b));
    let n = a.len() as f64;
    let mean = (n + 1.0) / 2.0;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in ra.iter().zip(&rb) {
        sab += (x - mean) * (y - mean);
        saa += (x - mean).powi(2);
        sbb += (y - mean).powi(2);
    }
    sab / (saa * sbb).sqrt()
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&i, &j| v[i].total_cmp(&v[j]));
    let mut r = vec![0.0; v.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && v[order[end]] == v[order[start]] {
            end += 1;
        }
        let avg = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            r[i] = avg;
        }
        start = end;
    }
    r
}

fn check_finite(name: &str, values: &[f64]) -> Result<(), RunError> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(RunError::config(format!("`{name}` must be finite")))
    }
}
