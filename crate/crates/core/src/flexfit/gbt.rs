//! First-order gradient-boosted regression trees.
//!
//! Each round fits a depth-limited tree to the negative loss gradient by
//! greedy variance-reduction splits over quantile-binned thresholds (at most
//! 64 bins per feature), then sets every leaf to `learning_rate × mean
//! negative gradient` of its rows. For squared loss that is a damped
//! residual-mean step; for log loss, whose curvature is at most 1/4, the same
//! step lowers the loss whenever `learning_rate < 8`, so the training loss is
//! non-increasing in the number of trees for every admissible configuration.
//!
//! JSON schema: `{ features, target, loss, base_score, learning_rate,
//! trees: [{ nodes: [{ kind: "split", feature, threshold, left, right } |
//! { kind: "leaf", value }] }] }` with node 0 as the root; rows with
//! `x[feature] <= threshold` go left.

use super::{check_binary, feature_matrix, target_column, FlexError};
use crate::Dataset;
use serde::{Deserialize, Serialize};

pub const MAX_BINS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Loss {
    Squared,
    Logistic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GbtConfig {
    pub n_trees: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    pub min_leaf: usize,
    pub max_bins: usize,
    pub loss: Loss,
}

impl Default for GbtConfig {
    fn default() -> Self {
        Self { n_trees: 200, max_depth: 3, learning_rate: 0.1, min_leaf: 5, max_bins: MAX_BINS, loss: Loss::Squared }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TreeNode {
    Split { feature: usize, threshold: f64, left: usize, right: usize },
    Leaf { value: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<TreeNode>,
}

impl Tree {
    pub fn evaluate(&self, row: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                TreeNode::Leaf { value } => return value,
                TreeNode::Split { feature, threshold, left, right } => {
                    at = if row[feature] <= threshold { left } else { right };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn go(t: &Tree, at: usize) -> usize {
            match t.nodes[at] {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => 1 + go(t, left).max(go(t, right)),
            }
        }
        go(self, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbtModel {
    pub features: Vec<String>,
    pub target: String,
    pub loss: Loss,
    /// Initial margin: target mean (squared) or log-odds (logistic).
    pub base_score: f64,
    pub learning_rate: f64,
    pub trees: Vec<Tree>,
    /// Training loss after 0, 1, …, n_trees trees; not serialized.
    #[serde(skip)]
    pub loss_trace: Vec<f64>,
}

impl GbtModel {
    /// Ensemble with no trees.
    pub fn constant(features: Vec<String>, base_score: f64, loss: Loss) -> Self {
        Self { features, target: String::new(), loss, base_score, learning_rate: 0.0, trees: Vec::new(), loss_trace: Vec::new() }
    }

    /// Additive score before the link: log-odds for logistic loss.
    pub fn margin_row(&self, row: &[f64]) -> f64 {
        self.base_score + self.trees.iter().map(|t| t.evaluate(row)).sum::<f64>()
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let m = self.margin_row(row);
        match self.loss {
            Loss::Squared => m,
            Loss::Logistic => crate::estimators::sigmoid(m),
        }
    }
}

fn mean_loss(loss: Loss, y: &[f64], margin: &[f64]) -> f64 {
    let total: f64 = match loss {
        Loss::Squared => y.iter().zip(margin).map(|(t, m)| (t - m).powi(2)).sum(),
        Loss::Logistic => y.iter().zip(margin).map(|(&t, &m)| crate::estimators::softplus(m) - t * m).sum(),
    };
    total / y.len() as f64
}

/// Per-feature cut points (all distinct values when there are at most
/// `max_bins`, otherwise quantiles) and each row's bin; bin `b` holds values
/// `<= cuts[b]` (and above `cuts[b-1]`), the last bin holds the rest.
struct Binned {
    cuts: Vec<Vec<f64>>,
    bins: Vec<Vec<u8>>,
}

fn bin_features(x: &[f64], n: usize, d: usize, max_bins: usize) -> Binned {
    let mut cuts = Vec::with_capacity(d);
    let mut bins = Vec::with_capacity(d);
    for j in 0..d {
        let mut col: Vec<f64> = (0..n).map(|i| x[i * d + j]).collect();
        col.sort_by(f64::total_cmp);
        let mut distinct = col.clone();
        distinct.dedup();
        // Few distinct values: every one is a candidate, so splits are exact.
        let mut c: Vec<f64> = if distinct.len() <= max_bins {
            distinct
        } else {
            let mut q: Vec<f64> = (1..max_bins).map(|q| col[(q * n / max_bins).min(n - 1)]).collect();
            q.dedup();
            q
        };
        // The maximum can never be a useful `<=` threshold.
        if c.last() == col.last() {
            c.pop();
        }
        let b = (0..n).map(|i| c.partition_point(|&t| t < x[i * d + j]) as u8).collect();
        cuts.push(c);
        bins.push(b);
    }
    Binned { cuts, bins }
}

struct Grower<'a> {
    binned: &'a Binned,
    grad: &'a [f64],
    config: &'a GbtConfig,
    nodes: Vec<TreeNode>,
}

impl Grower<'_> {
    fn grow(&mut self, rows: Vec<usize>, depth: usize) -> usize {
        let id = self.nodes.len();
        let sum: f64 = rows.iter().map(|&i| self.grad[i]).sum();
        self.nodes.push(TreeNode::Leaf { value: self.config.learning_rate * sum / rows.len() as f64 });
        if depth >= self.config.max_depth || rows.len() < 2 * self.config.min_leaf {
            return id;
        }
        let Some((feature, bin)) = self.best_split(&rows, sum) else {
            return id;
        };
        let codes = &self.binned.bins[feature];
        let (left, right): (Vec<usize>, Vec<usize>) = rows.into_iter().partition(|&i| codes[i] as usize <= bin);
        let l = self.grow(left, depth + 1);
        let r = self.grow(right, depth + 1);
        self.nodes[id] = TreeNode::Split { feature, threshold: self.binned.cuts[feature][bin], left: l, right: r };
        id
    }

    fn best_split(&self, rows: &[usize], total: f64) -> Option<(usize, usize)> {
        let n = rows.len() as f64;
        let parent = total * total / n;
        let min_leaf = self.config.min_leaf.max(1);
        let mut best: Option<(f64, usize, usize)> = None;
        for (j, cuts) in self.binned.cuts.iter().enumerate() {
            if cuts.is_empty() {
                continue;
            }
            let mut sums = vec![0.0; cuts.len() + 1];
            let mut counts = vec![0usize; cuts.len() + 1];
            for &i in rows {
                let b = self.binned.bins[j][i] as usize;
                sums[b] += self.grad[i];
                counts[b] += 1;
            }
            let (mut ls, mut lc) = (0.0, 0usize);
            for b in 0..cuts.len() {
                ls += sums[b];
                lc += counts[b];
                let rc = rows.len() - lc;
                if lc < min_leaf || rc < min_leaf {
                    continue;
                }
                let rs = total - ls;
                let gain = ls * ls / lc as f64 + rs * rs / rc as f64 - parent;
                if gain > 1e-12 * (1.0 + parent.abs()) && best.is_none_or(|(g, _, _)| gain > g) {
                    best = Some((gain, j, b));
                }
            }
        }
        best.map(|(_, j, b)| (j, b))
    }
}

/// Fit a boosted ensemble of `config.n_trees` trees (zero is allowed and
/// yields the base score).
pub fn gbt_train<S: AsRef<str>>(train: &Dataset, target: &str, features: &[S], config: &GbtConfig) -> Result<GbtModel, FlexError> {
    if config.max_depth == 0 || features.is_empty() {
        return Err(FlexError::InvalidConfig("max_depth and feature count must be at least 1".into()));
    }
    if !(config.learning_rate > 0.0) || (config.loss == Loss::Logistic && config.learning_rate >= 8.0) {
        return Err(FlexError::InvalidConfig("learning_rate must be in (0, 8) for log loss and > 0 otherwise".into()));
    }
    if !(2..=256).contains(&config.max_bins) {
        return Err(FlexError::InvalidConfig("max_bins must be in 2..=256".into()));
    }
    let n = train.n_rows();
    if n < 2 {
        return Err(FlexError::InsufficientData { needed: 2, got: n });
    }
    let d = features.len();
    let x = feature_matrix(train, features)?;
    let y = target_column(train, target)?;
    let mean = y.iter().sum::<f64>() / n as f64;
    let base_score = match config.loss {
        Loss::Squared => {
            if y.iter().all(|&v| v == y[0]) {
                return Err(FlexError::DegenerateTarget(target.to_string()));
            }
            mean
        }
        Loss::Logistic => {
            check_binary(y, target)?;
            if mean == 0.0 || mean == 1.0 {
                return Err(FlexError::DegenerateTarget(target.to_string()));
            }
            (mean / (1.0 - mean)).ln()
        }
    };

    let binned = bin_features(&x, n, d, config.max_bins);
    let mut margin = vec![base_score; n];
    let mut trace = vec![mean_loss(config.loss, y, &margin)];
    let mut trees = Vec::with_capacity(config.n_trees);
    let mut grad = vec![0.0; n];
    for _ in 0..config.n_trees {
        for i in 0..n {
            grad[i] = match config.loss {
                Loss::Squared => y[i] - margin[i],
                Loss::Logistic => y[i] - crate::estimators::sigmoid(margin[i]),
            };
        }
        let mut grower = Grower { binned: &binned, grad: &grad, config, nodes: Vec::new() };
        grower.grow((0..n).collect(), 0);
        let tree = Tree { nodes: grower.nodes };
        for (i, m) in margin.iter_mut().enumerate() {
            *m += tree.evaluate(&x[i * d..(i + 1) * d]);
        }
        trace.push(mean_loss(config.loss, y, &margin));
        trees.push(tree);
    }
    Ok(GbtModel {
        features: features.iter().map(|f| f.as_ref().to_string()).collect(),
        target: target.to_string(),
        loss: config.loss,
        base_score,
        learning_rate: config.learning_rate,
        trees,
        loss_trace: trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flexfit::{mse, predict, Model};
    use crate::rng;

    fn data(n: usize, seed: u64) -> Dataset {
        let a: Vec<f64> = (0..n as u64).map(|i| rng::normal(seed, 0, i)).collect();
        let b: Vec<f64> = (0..n as u64).map(|i| rng::normal(seed, 1, i)).collect();
        let step: Vec<f64> = a.iter().map(|&v| if v <= 0.3 { -1.0 } else { 2.0 }).collect();
        let smooth: Vec<f64> = a.iter().zip(&b).map(|(a, b)| a * b + (2.0 * a).sin()).collect();
        let label: Vec<f64> = smooth
            .iter()
            .enumerate()
            .map(|(i, &s)| f64::from(rng::uniform(seed, 2, i as u64) < crate::estimators::sigmoid(2.0 * s)))
            .collect();
        Dataset::from_columns([("a", a), ("b", b), ("step", step), ("smooth", smooth), ("label", label)], seed).unwrap()
    }

    #[test]
    fn step_function_is_one_split() {
        let mut d = data(500, 1);
        // A feature on a 40-point grid, so the step location is a candidate cut.
        let g: Vec<f64> = (0..500).map(|i| ((i * 17) % 40) as f64 / 10.0 - 2.0).collect();
        let step: Vec<f64> = g.iter().map(|&v| if v <= 0.3 { -1.0 } else { 2.0 }).collect();
        d = Dataset::from_columns([("a", g), ("b", d.column("b").unwrap().to_vec()), ("step", step)], 1).unwrap();
        let cfg = GbtConfig { n_trees: 200, max_depth: 1, learning_rate: 0.5, min_leaf: 1, ..Default::default() };
        let m = gbt_train(&d, "step", &["a", "b"], &cfg).unwrap();
        let pred = predict(&m.clone().into(), &d).unwrap();
        assert!(mse(d.column("step").unwrap(), &pred) < 1e-3);
        assert!(m.trees.iter().all(|t| t.depth() <= 1));
    }

    #[test]
    fn stump_routes_by_threshold() {
        let tree = Tree {
            nodes: vec![
                TreeNode::Split { feature: 0, threshold: 1.0, left: 1, right: 2 },
                TreeNode::Leaf { value: -3.0 },
                TreeNode::Leaf { value: 4.0 },
            ],
        };
        let m = GbtModel { trees: vec![tree], ..GbtModel::constant(vec!["a".into()], 0.0, Loss::Squared) };
        assert_eq!(m.predict_row(&[0.5]), -3.0);
        assert_eq!(m.predict_row(&[1.0]), -3.0);
        assert_eq!(m.predict_row(&[1.5]), 4.0);
    }

    #[test]
    fn zero_trees_give_base_score() {
        let d = data(200, 2);
        let cfg = GbtConfig { n_trees: 0, ..Default::default() };
        let m = gbt_train(&d, "smooth", &["a", "b"], &cfg).unwrap();
        let mean = d.column("smooth").unwrap().iter().sum::<f64>() / 200.0;
        assert!((m.predict_row(&[0.0, 0.0]) - mean).abs() < 1e-15);
        let cfg = GbtConfig { n_trees: 0, loss: Loss::Logistic, ..Default::default() };
        let m = gbt_train(&d, "label", &["a", "b"], &cfg).unwrap();
        let p = d.column("label").unwrap().iter().sum::<f64>() / 200.0;
        assert!((m.predict_row(&[0.0, 0.0]) - p).abs() < 1e-12);
    }

    #[test]
    fn training_loss_never_increases() {
        let d = data(400, 3);
        for (loss, target, lr) in [(Loss::Squared, "smooth", 0.3), (Loss::Logistic, "label", 1.0), (Loss::Logistic, "label", 7.5)] {
            let cfg = GbtConfig { n_trees: 60, max_depth: 3, learning_rate: lr, min_leaf: 3, loss, ..Default::default() };
            let m = gbt_train(&d, target, &["a", "b"], &cfg).unwrap();
            assert_eq!(m.loss_trace.len(), 61);
            for w in m.loss_trace.windows(2) {
                assert!(w[1] <= w[0] + 1e-12, "{loss:?}: {} -> {}", w[0], w[1]);
            }
            assert!(m.trees.iter().all(|t| t.depth() <= 3));
        }
    }

    #[test]
    fn probabilities_in_unit_interval_and_round_trip() {
        let d = data(300, 4);
        let cfg = GbtConfig { n_trees: 30, loss: Loss::Logistic, ..Default::default() };
        let model: Model = gbt_train(&d, "label", &["a", "b"], &cfg).unwrap().into();
        let pred = predict(&model, &d).unwrap();
        assert!(pred.iter().all(|&p| p > 0.0 && p < 1.0));
        let back = Model::from_json(&model.to_json().unwrap()).unwrap();
        assert_eq!(pred, predict(&back, &d).unwrap());
    }

    #[test]
    fn error_paths() {
        let mut d = data(50, 5);
        d.add_column("flat", vec![1.0; 50]).unwrap();
        let cfg = GbtConfig::default();
        assert!(matches!(gbt_train(&d, "flat", &["a"], &cfg), Err(FlexError::DegenerateTarget(_))));
        let log = GbtConfig { loss: Loss::Logistic, ..Default::default() };
        assert!(matches!(gbt_train(&d, "flat", &["a"], &log), Err(FlexError::DegenerateTarget(_))));
        assert!(matches!(gbt_train(&d, "smooth", &["a"], &log), Err(FlexError::NonBinaryTarget(_))));
        let bad = GbtConfig { max_depth: 0, ..Default::default() };
        assert!(matches!(gbt_train(&d, "smooth", &["a"], &bad), Err(FlexError::InvalidConfig(_))));
    }

    #[test]
    fn binning_respects_limit() {
        let x: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        let b = bin_features(&x, 1000, 1, 64);
        assert!(b.cuts[0].len() < 64);
        assert!(b.bins[0].iter().all(|&v| (v as usize) <= b.cuts[0].len()));
        // Rows in bin k satisfy x <= cuts[k].
        for (i, &v) in b.bins[0].iter().enumerate() {
            if (v as usize) < b.cuts[0].len() {
                assert!(x[i] <= b.cuts[0][v as usize]);
            }
            if v > 0 {
                assert!(x[i] > b.cuts[0][v as usize - 1]);
            }
        }
    }
}
