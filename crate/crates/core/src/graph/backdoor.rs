//! Backdoor paths and adjustment sets.

use super::{Dag, GraphError, MAX_ADJUSTMENT_CANDIDATES};
use serde::{Deserialize, Serialize};

/// Identification summary for one `(cause, outcome)` query.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdjustmentAnalysis {
    pub cause: String,
    pub outcome: String,
    /// Simple paths starting with an edge into `cause`, as node sequences.
    pub backdoor_paths: Vec<Vec<String>>,
    /// Every valid subset of the observed candidates, smallest first.
    pub valid_sets: Vec<Vec<String>>,
    /// Inclusion-minimal valid subsets.
    pub minimal_sets: Vec<Vec<String>>,
    pub identifiable: bool,
}

impl Dag {
    fn query(&self, cause: &str, outcome: &str) -> Result<(usize, usize), GraphError> {
        let (c, o) = (self.idx(cause)?, self.idx(outcome)?);
        if c == o {
            return Err(GraphError::InvalidQuery("cause and outcome must differ".into()));
        }
        Ok((c, o))
    }

    /// All simple paths `cause <- ... outcome`, in lexicographic neighbour order.
    pub fn backdoor_paths(&self, cause: &str, outcome: &str) -> Result<Vec<Vec<String>>, GraphError> {
        let (c, o) = self.query(cause, outcome)?;
        let neighbours: Vec<Vec<usize>> = (0..self.names.len())
            .map(|v| {
                let mut n: Vec<usize> = self.parents[v].iter().chain(&self.children[v]).copied().collect();
                n.sort_by(|&a, &b| self.names[a].cmp(&self.names[b]));
                n
            })
            .collect();
        let mut on_path = vec![false; self.names.len()];
        on_path[c] = true;
        let mut path = vec![c];
        let mut found = Vec::new();
        for &p in &self.parents[c] {
            self.extend_paths(p, o, &neighbours, &mut on_path, &mut path, &mut found);
        }
        Ok(found.into_iter().map(|p: Vec<usize>| p.into_iter().map(|i| self.names[i].clone()).collect()).collect())
    }

    fn extend_paths(
        &self,
        v: usize,
        target: usize,
        neighbours: &[Vec<usize>],
        on_path: &mut [bool],
        path: &mut Vec<usize>,
        found: &mut Vec<Vec<usize>>,
    ) {
        path.push(v);
        if v == target {
            found.push(path.clone());
        } else {
            on_path[v] = true;
            for &u in &neighbours[v] {
                if !on_path[u] {
                    self.extend_paths(u, target, neighbours, on_path, path, found);
                }
            }
            on_path[v] = false;
        }
        path.pop();
    }

    fn check_adjustment(&self, c: usize, o: usize, z: &[usize]) -> Result<(), GraphError> {
        if let Some(&bad) = z.iter().find(|&&v| v == c || v == o) {
            return Err(GraphError::OverlappingSets(self.names[bad].clone()));
        }
        Ok(())
    }

    /// Backdoor criterion: no member of `z` descends from `cause`, and `z`
    /// d-separates `cause` from `outcome` once `cause`'s outgoing edges are cut.
    pub fn is_valid_backdoor_set<S: AsRef<str>>(&self, cause: &str, outcome: &str, z: &[S]) -> Result<bool, GraphError> {
        let (c, o) = self.query(cause, outcome)?;
        let zi = self.indices(z)?;
        self.check_adjustment(c, o, &zi)?;
        let desc = self.descendants_mask(c);
        if zi.iter().any(|&v| desc[v]) {
            return Ok(false);
        }
        Ok(self.without_outgoing(c).d_separated_idx(&[c], &[o], &zi))
    }

    /// Enumerate every valid and every inclusion-minimal adjustment set drawn
    /// from the observed `candidates`.
    pub fn minimal_backdoor_sets<S: AsRef<str>>(
        &self,
        cause: &str,
        outcome: &str,
        candidates: &[S],
    ) -> Result<AdjustmentAnalysis, GraphError> {
        let (c, o) = self.query(cause, outcome)?;
        let mut pool: Vec<usize> = self.indices(candidates)?.into_iter().filter(|&v| v != c && v != o && self.observed[v]).collect();
        pool.sort_by(|&a, &b| self.names[a].cmp(&self.names[b]));
        pool.dedup();
        if pool.len() > MAX_ADJUSTMENT_CANDIDATES {
            return Err(GraphError::TooManyCandidates { count: pool.len(), max: MAX_ADJUSTMENT_CANDIDATES });
        }

        let desc = self.descendants_mask(c);
        let cut = self.without_outgoing(c);
        let mut masks: Vec<u32> = (0..1u32 << pool.len()).collect();
        // Size first, then lexicographic on the sorted pool.
        let members = |m: u32| -> Vec<usize> { (0..pool.len()).filter(|&i| m >> i & 1 == 1).collect() };
        masks.sort_by_key(|&m| (m.count_ones(), members(m)));

        let mut valid = Vec::new();
        let mut minimal: Vec<u32> = Vec::new();
        for m in masks {
            let z: Vec<usize> = members(m).into_iter().map(|i| pool[i]).collect();
            if z.iter().any(|&v| desc[v]) || !cut.d_separated_idx(&[c], &[o], &z) {
                continue;
            }
            valid.push(m);
            // Minimal unless some earlier (smaller) valid set is a subset of it.
            if minimal.iter().all(|&s| s & !m != 0) {
                minimal.push(m);
            }
        }
        let to_names = |m: &u32| -> Vec<String> { members(*m).into_iter().map(|i| self.names[pool[i]].clone()).collect() };
        Ok(AdjustmentAnalysis {
            cause: cause.to_string(),
            outcome: outcome.to_string(),
            backdoor_paths: self.backdoor_paths(cause, outcome)?,
            valid_sets: valid.iter().map(to_names).collect(),
            identifiable: !minimal.is_empty(),
            minimal_sets: minimal.iter().map(to_names).collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::{exogenous, hidden_confounder, nine_node};

    const NONE: [&str; 0] = [];

    #[test]
    fn nine_node_backdoor_paths() {
        let g = nine_node();
        let paths = g.backdoor_paths("x0", "y").unwrap();
        let expected: Vec<String> = ["x0", "x2", "x3", "y"].map(String::from).to_vec();
        assert!(paths.contains(&expected));
        // Every path enters x0 through a parent and is simple.
        for p in &paths {
            assert!(g.parents("x0").unwrap().contains(&p[1].as_str()));
            let mut s = p.clone();
            s.sort();
            s.dedup();
            assert_eq!(s.len(), p.len());
        }
    }

    #[test]
    fn exogenous_graph_has_no_backdoor() {
        let g = exogenous();
        assert!(g.backdoor_paths("x1", "y").unwrap().is_empty());
        let a = g.minimal_backdoor_sets("x1", "y", &["x2", "x3"]).unwrap();
        assert_eq!(a.minimal_sets, vec![Vec::<String>::new()]);
        assert!(a.identifiable);
    }

    #[test]
    fn hidden_confounder_paths_and_verdict() {
        let g = hidden_confounder();
        let paths = g.backdoor_paths("x", "y").unwrap();
        assert_eq!(paths, vec![vec!["x".to_string(), "z".into(), "y".into()]]);
        assert!(!g.is_valid_backdoor_set("x", "y", &NONE).unwrap());
        let a = g.minimal_backdoor_sets("x", "y", &["z"]).unwrap();
        assert!(!a.identifiable);
        assert!(a.minimal_sets.is_empty());
    }

    #[test]
    fn nine_node_validity() {
        let g = nine_node();
        assert!(g.is_valid_backdoor_set("x0", "y", &["x3"]).unwrap());
        assert!(g.is_valid_backdoor_set("x0", "y", &["x2"]).unwrap());
        assert!(!g.is_valid_backdoor_set("x0", "y", &["x1"]).unwrap());
        assert!(!g.is_valid_backdoor_set("x0", "y", &NONE).unwrap());
        assert!(!g.is_valid_backdoor_set("x0", "y", &["x4"]).unwrap());
        assert!(matches!(g.is_valid_backdoor_set("x0", "y", &["y"]), Err(GraphError::OverlappingSets(_))));
    }

    #[test]
    fn nine_node_minimal_sets() {
        let g = nine_node();
        let all: Vec<String> = g.nodes().iter().filter(|n| n.starts_with('x')).cloned().collect();
        let a = g.minimal_backdoor_sets("x0", "y", &all).unwrap();
        assert_eq!(a.minimal_sets, vec![vec!["x2".to_string()], vec!["x3".to_string()]]);
        assert!(a.identifiable);
        for set in &a.valid_sets {
            assert!(g.is_valid_backdoor_set("x0", "y", set).unwrap());
        }
        assert!(a.valid_sets.contains(&vec!["x2".into(), "x3".into(), "x4".into()]));
    }

    #[test]
    fn minimal_sets_are_minimal() {
        let g = nine_node();
        let a = g.minimal_backdoor_sets("x1", "x7", &["x0", "x2", "x3", "x4", "x5", "x6"]).unwrap();
        for set in &a.minimal_sets {
            for drop in 0..set.len() {
                let mut smaller = set.clone();
                smaller.remove(drop);
                assert!(!g.is_valid_backdoor_set("x1", "x7", &smaller).unwrap());
            }
        }
    }

    #[test]
    fn candidate_limit() {
        let names: Vec<String> = (0..23).map(|i| format!("n{i:02}")).collect();
        let edges: Vec<(String, String)> = (1..22).map(|i| (names[i].clone(), "n00".to_string())).collect();
        let g = Dag::new(names.clone(), edges).unwrap();
        let err = g.minimal_backdoor_sets("n22", "n00", &names).unwrap_err();
        assert!(matches!(err, GraphError::TooManyCandidates { count: 21, .. }));
    }
}
