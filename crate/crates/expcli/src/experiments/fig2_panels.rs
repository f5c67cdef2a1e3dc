//! Pearson correlation against k-NN mutual information on six linear panels
//! of increasing correlation and four non-linear shapes whose dependence is
//! invisible to `r`.

use super::check_finite;
use crate::{row, Report, RunConfig, RunError, Table};
use causalsim::estimators::{mutual_information, pearson};
use causalsim::rng;
use causalsim::Dataset;
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::f64::consts::PI;

pub const DEFAULT_N: usize = 2000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Params {
    /// Correlations of the six bivariate-normal panels; each in (-1, 1).
    pub rho: Vec<f64>,
    /// Neighbour count of the mutual-information estimator.
    pub k: usize,
    /// `x ~ U(-1, 1)`, `y = x² + N(0, sd²)`.
    pub quadratic_noise_sd: f64,
    /// `x ~ U(-π, π)`, `y = cos(2x) + N(0, sd²)`.
    pub sinusoid_noise_sd: f64,
    /// `θ ~ U(0, 2π)`, `(cos θ, sin θ)` plus `N(0, sd²)` on each axis.
    pub circle_noise_sd: f64,
    /// `x ~ U(-1, 1)`, `y = ±x + N(0, sd²)` with a fair random sign.
    pub cross_noise_sd: f64,
    /// Rows per panel copied to the plot-ready points table.
    pub plot_points: usize,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            rho: vec![0.0, 0.2, 0.4, 0.6, 0.8, 0.95],
            k: 3,
            quadratic_noise_sd: 0.1,
            sinusoid_noise_sd: 0.2,
            circle_noise_sd: 0.05,
            cross_noise_sd: 0.05,
            plot_points: 500,
        }
    }
}

struct Panel {
    name: String,
    kind: &'static str,
    parameter: f64,
    /// Closed-form mutual information in nats, when known.
    exact_mi: Option<f64>,
    x: Vec<f64>,
    y: Vec<f64>,
}

fn panels(seed: u64, n: usize, p: &Params) -> Vec<Panel> {
    let mut out = Vec::new();
    // Per panel: stream 0..3 are independent N(0,1) or U(0,1) sources.
    let stream = |name: &str| rng::derive_seed(seed, rng::label(name));
    let idx = 0..n as u64;
    for &rho in &p.rho {
        let name = format!("linear_rho_{rho}");
        let s = stream(&name);
        let x: Vec<f64> = idx.clone().map(|i| rng::normal(s, 0, i)).collect();
        let y: Vec<f64> = x.iter().zip(idx.clone()).map(|(&x, i)| rho * x + (1.0 - rho * rho).sqrt() * rng::normal(s, 1, i)).collect();
        out.push(Panel { name, kind: "linear", parameter: rho, exact_mi: Some(-0.5 * (1.0 - rho * rho).ln()), x, y });
    }
    let uniform =
        |s: u64, stream: u64, lo: f64, hi: f64| -> Vec<f64> { idx.clone().map(|i| lo + (hi - lo) * rng::uniform(s, stream, i)).collect() };
    let noise = |s: u64, stream: u64, sd: f64| -> Vec<f64> { idx.clone().map(|i| sd * rng::normal(s, stream, i)).collect() };

    let s = stream("quadratic");
    let x = uniform(s, 0, -1.0, 1.0);
    let y = x.iter().zip(noise(s, 1, p.quadratic_noise_sd)).map(|(x, e)| x * x + e).collect();
    out.push(Panel { name: "quadratic".into(), kind: "nonlinear", parameter: p.quadratic_noise_sd, exact_mi: None, x, y });

    let s = stream("sinusoid");
    let x = uniform(s, 0, -PI, PI);
    let y = x.iter().zip(noise(s, 1, p.sinusoid_noise_sd)).map(|(x, e)| (2.0 * x).cos() + e).collect();
    out.push(Panel { name: "sinusoid".into(), kind: "nonlinear", parameter: p.sinusoid_noise_sd, exact_mi: None, x, y });

    let s = stream("circle");
    let theta = uniform(s, 0, 0.0, 2.0 * PI);
    let x = theta.iter().zip(noise(s, 1, p.circle_noise_sd)).map(|(t, e)| t.cos() + e).collect();
    let y = theta.iter().zip(noise(s, 2, p.circle_noise_sd)).map(|(t, e)| t.sin() + e).collect();
    out.push(Panel { name: "circle".into(), kind: "nonlinear", parameter: p.circle_noise_sd, exact_mi: None, x, y });

    let s = stream("cross");
    let x = uniform(s, 0, -1.0, 1.0);
    let sign = uniform(s, 2, 0.0, 1.0);
    let y = x.iter().zip(sign).zip(noise(s, 1, p.cross_noise_sd)).map(|((x, u), e)| if u < 0.5 { x + e } else { -x + e }).collect();
    out.push(Panel { name: "cross".into(), kind: "nonlinear", parameter: p.cross_noise_sd, exact_mi: None, x, y });
    out
}

fn validate(p: &Params) -> Result<(), RunError> {
    if p.rho.is_empty() || p.rho.iter().any(|r| !(r.abs() < 1.0)) {
        return Err(RunError::config("rho must be a non-empty list of values in (-1, 1)"));
    }
    let sds = [p.quadratic_noise_sd, p.sinusoid_noise_sd, p.circle_noise_sd, p.cross_noise_sd];
    check_finite("noise_sd", &sds)?;
    if sds.iter().any(|&s| s < 0.0) {
        return Err(RunError::config("noise standard deviations must be non-negative"));
    }
    if p.k == 0 {
        return Err(RunError::config("k must be at least 1"));
    }
    Ok(())
}

pub fn run(config: &RunConfig) -> Result<Report, RunError> {
    let n = config.resolve_n(DEFAULT_N)?;
    let p: Params = config.params()?;
    validate(&p)?;
    if p.k >= n {
        return Err(RunError::config(format!("k = {} needs more than {n} rows", p.k)));
    }

    let mut stats =
        Table::new("panels", &["panel", "kind", "parameter", "r", "p_value", "mi_nats", "mi_raw_nats", "mi_exact_nats", "k", "n"]);
    let mut points = Table::new("points", &["panel", "index", "x", "y"]);
    let mut summary = serde_json::Map::new();
    for panel in panels(config.seed, n, &p) {
        let pseed = rng::derive_seed(config.seed, rng::label(&panel.name));
        let data = Dataset::from_columns([("x", panel.x), ("y", panel.y)], pseed)?;
        let c = pearson(&data, "x", "y")?;
        let mi = mutual_information(&data, "x", "y", p.k)?;
        let exact = panel.exact_mi.map_or_else(|| crate::Cell::from(""), crate::Cell::from);
        stats.push(vec![
            panel.name.as_str().into(),
            panel.kind.into(),
            panel.parameter.into(),
            c.r.into(),
            c.p.into(),
            mi.mi.into(),
            mi.raw.into(),
            exact,
            p.k.into(),
            n.into(),
        ]);
        let (xs, ys) = (data.column("x")?, data.column("y")?);
        for i in 0..p.plot_points.min(n) {
            points.push(row![panel.name.as_str(), i, xs[i], ys[i]]);
        }
        summary.insert(panel.name.clone(), json!({ "r": c.r, "mi_nats": mi.mi, "mi_exact_nats": panel.exact_mi }));
    }

    let mut report = Report::new("fig2_panels", config, n, &p);
    report.note("mutual information is reported in nats (natural logarithm)");
    report.note("panel shapes and noise levels are fixed defaults chosen for this runner; only qualitative contrasts are meaningful");
    report.summary = json!({ "units": "nats", "panels": summary });
    report.tables.push(stats);
    report.tables.push(points);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nonlinear_shapes_hide_from_pearson() {
        let r = run(&RunConfig::new(5)).unwrap();
        let t = r.table("panels").unwrap();
        assert_eq!(t.rows.len(), 10);
        for shape in ["quadratic", "sinusoid", "circle", "cross"] {
            let rr = t.number("panel", shape, "r").unwrap();
            let mi = t.number("panel", shape, "mi_nats").unwrap();
            assert!(rr.abs() < 0.1 && mi > 0.3, "{shape}: r {rr}, mi {mi}");
        }
        let strong = t.number("panel", "linear_rho_0.95", "mi_nats").unwrap();
        assert!((strong - (-0.5 * (1.0f64 - 0.95 * 0.95).ln())).abs() < 0.1);
        assert_eq!(r.table("points").unwrap().rows.len(), 10 * 500);
    }

    #[test]
    fn rejects_perfect_correlation() {
        let cfg = RunConfig::new(0).with_param("rho", toml::Value::Array(vec![1.0.into()]));
        assert!(matches!(run(&cfg), Err(RunError::ConfigValidation(_))));
    }
}
