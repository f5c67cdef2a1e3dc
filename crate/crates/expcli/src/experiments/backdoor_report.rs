//! Identification report for a cause/outcome pair of the nine-node model,
//! plus the classic graph where a hidden common cause blocks identification.

use crate::{row, Report, RunConfig, RunError, Table};
use causalsim::graph::{AdjustmentAnalysis, Dag};
use causalsim::scm::presets::mediated_confounding;
use serde::{Deserialize, Serialize};
use serde_json::json;

/// Purely graphical; `n` is validated and echoed but draws nothing.
pub const DEFAULT_N: usize = 5000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Params {
    pub cause: String,
    pub outcome: String,
}

impl Default for Params {
    fn default() -> Self {
        Self { cause: "x0".into(), outcome: "y".into() }
    }
}

/// `z -> x`, `z -> y`, `x -> y` with `z` unobserved.
pub fn hidden_confounder_graph() -> Dag {
    Dag::new(["x", "y", "z"], [("z", "x"), ("z", "y"), ("x", "y")])
        .and_then(|g| g.with_unobserved(&["z"]))
        .expect("three-node graph is valid")
}

fn analyse(g: &Dag, cause: &str, outcome: &str) -> Result<AdjustmentAnalysis, RunError> {
    let candidates: Vec<&String> = g.nodes().iter().filter(|v| *v != cause && *v != outcome).collect();
    Ok(g.minimal_backdoor_sets(cause, outcome, &candidates)?)
}

pub fn run(config: &RunConfig) -> Result<Report, RunError> {
    let n = config.resolve_n(DEFAULT_N)?;
    let p: Params = config.params()?;
    let nine = Dag::from_model(&mediated_confounding());
    let hidden = hidden_confounder_graph();
    let queries = [("nine_node", &nine, p.cause.as_str(), p.outcome.as_str()), ("hidden_confounder", &hidden, "x", "y")];

    let mut paths = Table::new("backdoor_paths", &["graph", "cause", "outcome", "index", "length", "path"]);
    let mut sets = Table::new("adjustment_sets", &["graph", "cause", "outcome", "set", "size", "minimal"]);
    let mut summary = serde_json::Map::new();
    for (label, g, cause, outcome) in queries {
        let a = analyse(g, cause, outcome)?;
        for (i, path) in a.backdoor_paths.iter().enumerate() {
            paths.push(row![label, cause, outcome, i, path.len() - 1, g.render_path(path)]);
        }
        for set in &a.valid_sets {
            let minimal = a.minimal_sets.contains(set);
            sets.push(row![label, cause, outcome, format!("{{{}}}", set.join(",")), set.len(), minimal]);
        }
        summary.insert(
            label.to_string(),
            json!({
                "cause": cause,
                "outcome": outcome,
                "edge_list": g.to_edge_list(),
                "backdoor_paths": a.backdoor_paths.iter().map(|p| g.render_path(p)).collect::<Vec<_>>(),
                "minimal_sets": a.minimal_sets,
                "valid_set_count": a.valid_sets.len(),
                "identifiable": a.identifiable,
            }),
        );
    }

    let mut report = Report::new("backdoor_report", config, n, &p);
    report.note("candidates are every observed node other than the cause and outcome; descendants of the cause are never valid");
    report.note("in hidden_confounder, z is unobserved and so cannot be adjusted for");
    report.summary = summary.into();
    report.tables.push(paths);
    report.tables.push(sets);
    Ok(report)
}
