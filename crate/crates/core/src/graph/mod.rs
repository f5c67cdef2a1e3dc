//! Directed acyclic graphs for causal identification.
//!
//! Nodes may be flagged unobserved: they still take part in path blocking but
//! can never be used for adjustment.

mod backdoor;
mod dsep;
mod format;

pub use backdoor::AdjustmentAnalysis;

use crate::scm::StructuralModel;
use std::collections::{BTreeSet, HashMap};

/// Candidate sets above this size are refused rather than approximated.
pub const MAX_ADJUSTMENT_CANDIDATES: usize = 20;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("graph has a cycle: {}", .0.join(" -> "))]
    Cycle(Vec<String>),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("node `{0}` declared twice")]
    DuplicateNode(String),
    #[error("node sets overlap on `{0}`")]
    OverlappingSets(String),
    #[error("{count} adjustment candidates exceed the exhaustive-search limit of {max}")]
    TooManyCandidates { count: usize, max: usize },
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dag {
    names: Vec<String>,
    index: HashMap<String, usize>,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
    observed: Vec<bool>,
}

impl Dag {
    /// Build from node names and `(parent, child)` edges. Duplicate edges are merged.
    pub fn new<N, A, B>(nodes: impl IntoIterator<Item = N>, edges: impl IntoIterator<Item = (A, B)>) -> Result<Self, GraphError>
    where
        N: Into<String>,
        A: AsRef<str>,
        B: AsRef<str>,
    {
        let names: Vec<String> = nodes.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(names.len());
        for (i, n) in names.iter().enumerate() {
            if index.insert(n.clone(), i).is_some() {
                return Err(GraphError::DuplicateNode(n.clone()));
            }
        }
        let k = names.len();
        let mut parents = vec![Vec::new(); k];
        let mut children = vec![Vec::new(); k];
        for (a, b) in edges {
            let lookup = |s: &str| index.get(s).copied().ok_or_else(|| GraphError::UnknownNode(s.to_string()));
            let (p, c) = (lookup(a.as_ref())?, lookup(b.as_ref())?);
            if p == c {
                return Err(GraphError::Cycle(vec![names[p].clone(), names[p].clone()]));
            }
            if !children[p].contains(&c) {
                children[p].push(c);
                parents[c].push(p);
            }
        }
        // Neighbour lists sorted by name so every traversal is reproducible.
        for list in parents.iter_mut().chain(children.iter_mut()) {
            list.sort_by(|&x, &y| names[x].cmp(&names[y]));
        }
        let dag = Self { names, index, parents, children, observed: vec![true; k] };
        dag.check_acyclic()?;
        Ok(dag)
    }

    /// Graph induced by a structural model; every node observed.
    pub fn from_model(model: &StructuralModel) -> Self {
        Self::new(model.nodes().iter().cloned(), model.edges()).expect("validated models are acyclic")
    }

    /// Mark the named nodes as unobserved.
    pub fn with_unobserved<S: AsRef<str>>(mut self, hidden: &[S]) -> Result<Self, GraphError> {
        for h in hidden {
            let i = self.idx(h.as_ref())?;
            self.observed[i] = false;
        }
        Ok(self)
    }

    pub fn nodes(&self) -> &[String] {
        &self.names
    }

    pub fn edges(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for (p, cs) in self.children.iter().enumerate() {
            for &c in cs {
                out.push((self.names[p].clone(), self.names[c].clone()));
            }
        }
        out
    }

    pub fn is_observed(&self, node: &str) -> Result<bool, GraphError> {
        Ok(self.observed[self.idx(node)?])
    }

    pub fn parents(&self, node: &str) -> Result<Vec<&str>, GraphError> {
        Ok(self.parents[self.idx(node)?].iter().map(|&i| self.names[i].as_str()).collect())
    }

    pub fn children(&self, node: &str) -> Result<Vec<&str>, GraphError> {
        Ok(self.children[self.idx(node)?].iter().map(|&i| self.names[i].as_str()).collect())
    }

    pub(crate) fn idx(&self, node: &str) -> Result<usize, GraphError> {
        self.index.get(node).copied().ok_or_else(|| GraphError::UnknownNode(node.to_string()))
    }

    pub(crate) fn indices<S: AsRef<str>>(&self, nodes: &[S]) -> Result<Vec<usize>, GraphError> {
        nodes.iter().map(|n| self.idx(n.as_ref())).collect()
    }

    /// Kahn's algorithm, ready nodes taken in name order.
    fn kahn(&self) -> (Vec<usize>, Vec<usize>) {
        let k = self.names.len();
        let mut indegree: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut ready: BTreeSet<(&str, usize)> = (0..k).filter(|&i| indegree[i] == 0).map(|i| (self.names[i].as_str(), i)).collect();
        let mut order = Vec::with_capacity(k);
        while let Some((_, v)) = ready.pop_first() {
            order.push(v);
            for &c in &self.children[v] {
                indegree[c] -= 1;
                if indegree[c] == 0 {
                    ready.insert((self.names[c].as_str(), c));
                }
            }
        }
        (order, indegree)
    }

    fn check_acyclic(&self) -> Result<(), GraphError> {
        let (order, indegree) = self.kahn();
        if order.len() == self.names.len() {
            return Ok(());
        }
        let start = (0..self.names.len()).find(|&i| indegree[i] > 0).expect("leftover node");
        let mut pos = vec![usize::MAX; self.names.len()];
        let mut path = Vec::new();
        let mut v = start;
        while pos[v] == usize::MAX {
            pos[v] = path.len();
            path.push(v);
            v = *self.parents[v].iter().find(|&&p| indegree[p] > 0).expect("leftover parent");
        }
        let mut cycle: Vec<String> = path[pos[v]..].iter().rev().map(|&i| self.names[i].clone()).collect();
        cycle.push(cycle[0].clone());
        Err(GraphError::Cycle(cycle))
    }

    /// Every edge points from an earlier to a later node; ties broken by name.
    pub fn topological_sort(&self) -> Vec<String> {
        self.kahn().0.into_iter().map(|i| self.names[i].clone()).collect()
    }

    pub(crate) fn descendants_mask(&self, v: usize) -> Vec<bool> {
        let mut mask = vec![false; self.names.len()];
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            for &c in &self.children[u] {
                if !mask[c] {
                    mask[c] = true;
                    stack.push(c);
                }
            }
        }
        mask
    }

    /// Ancestors of `seeds`, the seeds included.
    pub(crate) fn ancestors_mask(&self, seeds: &[usize]) -> Vec<bool> {
        let mut mask = vec![false; self.names.len()];
        let mut stack: Vec<usize> = seeds.to_vec();
        for &s in seeds {
            mask[s] = true;
        }
        while let Some(u) = stack.pop() {
            for &p in &self.parents[u] {
                if !mask[p] {
                    mask[p] = true;
                    stack.push(p);
                }
            }
        }
        mask
    }

    pub fn descendants(&self, node: &str) -> Result<Vec<&str>, GraphError> {
        let mask = self.descendants_mask(self.idx(node)?);
        Ok((0..self.names.len()).filter(|&i| mask[i]).map(|i| self.names[i].as_str()).collect())
    }

    /// Copy with the outgoing edges of `v` removed.
    pub(crate) fn without_outgoing(&self, v: usize) -> Self {
        let mut g = self.clone();
        for c in std::mem::take(&mut g.children[v]) {
            g.parents[c].retain(|&p| p != v);
        }
        g
    }

    /// `a <- b -> c` style rendering of a node sequence.
    pub fn render_path<S: AsRef<str>>(&self, path: &[S]) -> String {
        let mut out = String::new();
        for (i, n) in path.iter().enumerate() {
            if i > 0 {
                let prev = path[i - 1].as_ref();
                let forward = self.index.get(prev).zip(self.index.get(n.as_ref())).is_some_and(|(&a, &b)| self.children[a].contains(&b));
                out.push_str(if forward { " -> " } else { " <- " });
            }
            out.push_str(n.as_ref());
        }
        out
    }
}
