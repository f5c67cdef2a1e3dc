//! Structural causal models.
//!
//! A model is a list of nodes, each defined by exactly one assignment
//! `node := f(parents) + scale * noise`. Assignments are directional: the
//! right-hand side generates the left, never the reverse. Models are validated
//! once (acyclicity, known parents, unique assignments) and are immutable
//! afterwards; interventions build a new model.

mod analytic;
mod file;
pub mod presets;
mod sample;

pub use analytic::{PopulationFit, PopulationMoments};
pub use file::{ModelFileError, NodeRecord};

use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum ScmError {
    #[error("assignments form a cycle: {}", .0.join(" -> "))]
    Cycle(Vec<String>),
    #[error("node `{node}` references unknown parent `{parent}`")]
    UnknownParent { node: String, parent: String },
    #[error("node `{0}` has more than one assignment")]
    DuplicateAssignment(String),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("node `{node}` has {weights} weights for {parents} parents")]
    WeightArity { node: String, weights: usize, parents: usize },
    #[error("node `{node}` has invalid noise: {reason}")]
    InvalidNoise { node: String, reason: String },
    #[error("node `{0}` is not linear with Gaussian or constant noise")]
    Nonlinear(String),
    #[error("regressor covariance is singular (condition number {condition:.3e})")]
    SingularCovariance { condition: f64 },
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("sample size must be at least 1")]
    EmptySample,
}

/// Distribution of the exogenous noise term of one assignment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum NoiseDist {
    Gaussian { mean: f64, sd: f64 },
    Uniform { lo: f64, hi: f64 },
    Constant { value: f64 },
}

/// Noise term `scale * draw`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub dist: NoiseDist,
    pub scale: f64,
}

impl NoiseSpec {
    pub fn standard_normal() -> Self {
        Self::gaussian(0.0, 1.0)
    }

    pub fn gaussian(mean: f64, sd: f64) -> Self {
        Self { dist: NoiseDist::Gaussian { mean, sd }, scale: 1.0 }
    }

    pub fn uniform(lo: f64, hi: f64) -> Self {
        Self { dist: NoiseDist::Uniform { lo, hi }, scale: 1.0 }
    }

    pub fn constant(value: f64) -> Self {
        Self { dist: NoiseDist::Constant { value }, scale: 1.0 }
    }

    pub fn scaled(mut self, scale: f64) -> Self {
        self.scale *= scale;
        self
    }

    fn check(&self) -> Result<(), String> {
        if !self.scale.is_finite() {
            return Err("scale must be finite".into());
        }
        match self.dist {
            NoiseDist::Gaussian { mean, sd } if !(sd >= 0.0) || !mean.is_finite() || !sd.is_finite() => {
                Err(format!("gaussian needs finite mean and sd >= 0, got ({mean}, {sd})"))
            }
            NoiseDist::Uniform { lo, hi } if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() => {
                Err(format!("uniform needs finite lo <= hi, got ({lo}, {hi})"))
            }
            NoiseDist::Constant { value } if !value.is_finite() => Err("constant must be finite".into()),
            _ => Ok(()),
        }
    }

    pub(crate) fn mean(&self) -> f64 {
        self.scale
            * match self.dist {
                NoiseDist::Gaussian { mean, .. } => mean,
                NoiseDist::Uniform { lo, hi } => 0.5 * (lo + hi),
                NoiseDist::Constant { value } => value,
            }
    }

    /// Variance when the noise is Gaussian or constant.
    pub(crate) fn gaussian_variance(&self) -> Option<f64> {
        match self.dist {
            NoiseDist::Gaussian { sd, .. } => Some((self.scale * sd).powi(2)),
            NoiseDist::Constant { .. } => Some(0.0),
            NoiseDist::Uniform { .. } => None,
        }
    }
}

/// Opaque deterministic mechanism of the parent values.
pub type Mechanism = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum AssignmentKind {
    Linear { weights: Vec<f64>, intercept: f64 },
    Custom(Mechanism),
}

impl fmt::Debug for AssignmentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Linear { weights, intercept } => {
                f.debug_struct("Linear").field("weights", weights).field("intercept", intercept).finish()
            }
            Self::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// Right-hand side of `node := ...`.
#[derive(Debug, Clone)]
pub struct StructuralAssignment {
    pub parents: Vec<String>,
    pub kind: AssignmentKind,
    pub noise: NoiseSpec,
}

impl StructuralAssignment {
    /// `intercept + sum(weight * parent) + noise`.
    pub fn linear<S: Into<String>>(parents: impl IntoIterator<Item = (S, f64)>, intercept: f64, noise: NoiseSpec) -> Self {
        let (parents, weights) = parents.into_iter().map(|(p, w)| (p.into(), w)).unzip();
        Self { parents, kind: AssignmentKind::Linear { weights, intercept }, noise }
    }

    /// Exogenous node: noise only.
    pub fn exogenous(noise: NoiseSpec) -> Self {
        Self::linear(std::iter::empty::<(String, f64)>(), 0.0, noise)
    }

    /// `f(parents) + noise` for an arbitrary deterministic `f`.
    pub fn custom<S: Into<String>>(
        parents: impl IntoIterator<Item = S>,
        f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        noise: NoiseSpec,
    ) -> Self {
        Self { parents: parents.into_iter().map(Into::into).collect(), kind: AssignmentKind::Custom(Arc::new(f)), noise }
    }

    pub fn is_linear(&self) -> bool {
        matches!(self.kind, AssignmentKind::Linear { .. })
    }

    fn evaluate(&self, parent_values: &[f64]) -> f64 {
        match &self.kind {
            AssignmentKind::Linear { weights, intercept } => intercept + weights.iter().zip(parent_values).map(|(w, v)| w * v).sum::<f64>(),
            AssignmentKind::Custom(f) => f(parent_values),
        }
    }
}

/// Unvalidated list of `(node, assignment)` pairs in declaration order.
#[derive(Debug, Clone, Default)]
pub struct ModelSpec {
    entries: Vec<(String, StructuralAssignment)>,
}

impl ModelSpec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn assign(mut self, node: impl Into<String>, assignment: StructuralAssignment) -> Self {
        self.entries.push((node.into(), assignment));
        self
    }

    pub fn push(&mut self, node: impl Into<String>, assignment: StructuralAssignment) {
        self.entries.push((node.into(), assignment));
    }

    /// Check well-formedness and acyclicity, caching a topological order.
    pub fn validate(self) -> Result<StructuralModel, ScmError> {
        let mut index = HashMap::with_capacity(self.entries.len());
        for (i, (name, _)) in self.entries.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(ScmError::DuplicateAssignment(name.clone()));
            }
        }
        let mut parent_index = Vec::with_capacity(self.entries.len());
        for (name, a) in &self.entries {
            if let AssignmentKind::Linear { weights, intercept } = &a.kind {
                if weights.len() != a.parents.len() {
                    return Err(ScmError::WeightArity { node: name.clone(), weights: weights.len(), parents: a.parents.len() });
                }
                if !intercept.is_finite() || weights.iter().any(|w| !w.is_finite()) {
                    return Err(ScmError::InvalidNoise { node: name.clone(), reason: "weights and intercept must be finite".into() });
                }
            }
            a.noise.check().map_err(|reason| ScmError::InvalidNoise { node: name.clone(), reason })?;
            let ps = a
                .parents
                .iter()
                .map(|p| index.get(p).copied().ok_or_else(|| ScmError::UnknownParent { node: name.clone(), parent: p.clone() }))
                .collect::<Result<Vec<_>, _>>()?;
            parent_index.push(ps);
        }
        let (names, assignments): (Vec<_>, Vec<_>) = self.entries.into_iter().unzip();
        let order = topological_order(&names, &parent_index)?;
        Ok(StructuralModel { names, assignments, parent_index, index, order })
    }
}

/// Kahn's algorithm over parent lists; ties resolved by declaration order.
fn topological_order(names: &[String], parents: &[Vec<usize>]) -> Result<Vec<usize>, ScmError> {
    let n = names.len();
    let mut children = vec![Vec::new(); n];
    let mut indegree = vec![0usize; n];
    for (child, ps) in parents.iter().enumerate() {
        for &p in ps {
            children[p].push(child);
            indegree[child] += 1;
        }
    }
    let mut ready: std::collections::BTreeSet<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = ready.pop_first() {
        order.push(v);
        for &c in &children[v] {
            indegree[c] -= 1;
            if indegree[c] == 0 {
                ready.insert(c);
            }
        }
    }
    if order.len() == n {
        return Ok(order);
    }
    // Walk parent links among the leftover nodes until one repeats.
    let start = (0..n).find(|&i| indegree[i] > 0).expect("a node remains");
    let mut seen = vec![usize::MAX; n];
    let mut path = Vec::new();
    let mut v = start;
    while seen[v] == usize::MAX {
        seen[v] = path.len();
        path.push(v);
        v = *parents[v].iter().find(|&&p| indegree[p] > 0).expect("leftover node has a leftover parent");
    }
    let mut cycle: Vec<String> = path[seen[v]..].iter().rev().map(|&i| names[i].clone()).collect();
    cycle.push(cycle[0].clone());
    Err(ScmError::Cycle(cycle))
}

/// A validated, immutable structural causal model.
#[derive(Debug, Clone)]
pub struct StructuralModel {
    names: Vec<String>,
    assignments: Vec<StructuralAssignment>,
    parent_index: Vec<Vec<usize>>,
    index: HashMap<String, usize>,
    order: Vec<usize>,
}

impl StructuralModel {
    pub fn nodes(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Node names in the cached evaluation order.
    pub fn topological_order(&self) -> Vec<&str> {
        self.order.iter().map(|&i| self.names[i].as_str()).collect()
    }

    pub fn assignment(&self, node: &str) -> Result<&StructuralAssignment, ScmError> {
        Ok(&self.assignments[self.node_index(node)?])
    }

    pub fn node_index(&self, node: &str) -> Result<usize, ScmError> {
        self.index.get(node).copied().ok_or_else(|| ScmError::UnknownNode(node.to_string()))
    }

    /// `(parent, child)` pairs induced by the assignments.
    pub fn edges(&self) -> Vec<(String, String)> {
        self.assignments.iter().zip(&self.names).flat_map(|(a, child)| a.parents.iter().map(move |p| (p.clone(), child.clone()))).collect()
    }

    /// Graph surgery: replace `node`'s assignment by `value`, cutting its parents.
    pub fn intervene(&self, node: &str, value: NoiseSpec) -> Result<StructuralModel, ScmError> {
        let target = self.node_index(node)?;
        let mut spec = ModelSpec::new();
        for (i, (name, a)) in self.names.iter().zip(&self.assignments).enumerate() {
            let a = if i == target { StructuralAssignment::exogenous(value) } else { a.clone() };
            spec.push(name.clone(), a);
        }
        spec.validate()
    }

    /// `do(node := value)` with a constant.
    pub fn intervene_constant(&self, node: &str, value: f64) -> Result<StructuralModel, ScmError> {
        self.intervene(node, NoiseSpec::constant(value))
    }

    fn linear_parts(&self, i: usize) -> Result<(&[f64], f64, f64), ScmError> {
        let a = &self.assignments[i];
        match (&a.kind, a.noise.gaussian_variance()) {
            (AssignmentKind::Linear { weights, intercept }, Some(var)) => Ok((weights, *intercept, var)),
            _ => Err(ScmError::Nonlinear(self.names[i].clone())),
        }
    }
}
