//! Four regressions of `y` on `x0` in the nine-node model. Each coefficient is
//! compared with the population least-squares value for the same regressor
//! set, which is what OLS converges to whether or not it is causal.

use crate::{row, Report, RunConfig, RunError, Table};
use causalsim::estimators::{ols_fit, INTERCEPT};
use causalsim::scm::presets::mediated_confounding;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

pub const DEFAULT_N: usize = 5000;

/// `(name, regressors)` for every scenario, in report order.
pub const SCENARIOS: [(&str, &[&str]); 4] = [
    ("naive", &["x0"]),
    ("all_variables", &["x0", "x1", "x2", "x3", "x4", "x5", "x6", "x7"]),
    ("mediator", &["x0", "x1"]),
    ("backdoor", &["x0", "x3"]),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Params {
    /// Flag coefficients further than this many standard errors from the oracle.
    pub flag_standard_errors: f64,
}

impl Default for Params {
    fn default() -> Self {
        Self { flag_standard_errors: 4.0 }
    }
}

pub fn run(config: &RunConfig) -> Result<Report, RunError> {
    let n = config.resolve_n(DEFAULT_N)?;
    let p: Params = config.params()?;
    if !(p.flag_standard_errors > 0.0) {
        return Err(RunError::config("flag_standard_errors must be positive"));
    }
    let model = mediated_confounding();
    let data = model.sample(n, config.seed)?;
    let total_effect = model.total_effect_linear("x0", "y")?;

    let mut table = Table::new(
        "regressions",
        &["scenario", "regressors", "term", "estimate", "std_error", "p_value", "oracle", "abs_error", "error_in_se", "flagged"],
    );
    let mut per_scenario = Map::new();
    let mut flagged_total = 0;
    for (name, regs) in SCENARIOS {
        let fit = ols_fit(&data, "y", regs)?;
        let oracle = model.population_regression("y", regs)?;
        let mut flagged = 0;
        for (i, term) in fit.terms.iter().enumerate() {
            let truth = if term == INTERCEPT { oracle.intercept } else { oracle.coefficient(term).expect("same regressors") };
            let err = (fit.coefficients[i] - truth).abs();
            let z = err / fit.std_errors[i];
            let flag = z > p.flag_standard_errors;
            flagged += usize::from(flag);
            table.push(row![
                name,
                regs.join("+"),
                term.as_str(),
                fit.coefficients[i],
                fit.std_errors[i],
                fit.p_values[i],
                truth,
                err,
                z,
                flag
            ]);
        }
        flagged_total += flagged;
        per_scenario.insert(
            name.to_string(),
            json!({
                "x0_estimate": fit.coefficient("x0"),
                "x0_std_error": fit.std_error("x0"),
                "x0_oracle": oracle.coefficient("x0"),
                "flagged_terms": flagged,
            }),
        );
    }

    let mut report = Report::new("part2_regressions", config, n, &p);
    report.note("oracle is the population least-squares coefficient for the same regressor set");
    report.note("causal_total_effect is the sum over directed x0 -> y paths of edge-weight products");
    report.summary = json!({
        "causal_total_effect": total_effect,
        "flagged_terms": flagged_total,
        "scenarios": Value::Object(per_scenario),
    });
    report.tables.push(table);
    Ok(report)
}
