//! d-separation, computed two independent ways.

use super::{Dag, GraphError};
use std::collections::VecDeque;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Dir {
    /// Arrived from a child (or the trail starts here).
    Up,
    /// Arrived from a parent.
    Down,
}

impl Dag {
    fn check_disjoint(&self, sets: [&[usize]; 3]) -> Result<(), GraphError> {
        let mut seen = vec![false; self.names.len()];
        for set in sets {
            let mut local = vec![false; self.names.len()];
            for &v in set {
                if seen[v] && !local[v] {
                    return Err(GraphError::OverlappingSets(self.names[v].clone()));
                }
                seen[v] = true;
                local[v] = true;
            }
        }
        Ok(())
    }

    /// Nodes reachable from `sources` along trails active given `given`.
    pub(crate) fn active_reach(&self, sources: &[usize], given: &[bool]) -> Vec<bool> {
        let k = self.names.len();
        let seeds: Vec<usize> = (0..k).filter(|&i| given[i]).collect();
        let opens_collider = self.ancestors_mask(&seeds);
        let mut visited = vec![[false; 2]; k];
        let mut reach = vec![false; k];
        let mut queue: VecDeque<(usize, Dir)> = sources.iter().map(|&s| (s, Dir::Up)).collect();
        while let Some((v, d)) = queue.pop_front() {
            let slot = d as usize;
            if visited[v][slot] {
                continue;
            }
            visited[v][slot] = true;
            if !given[v] {
                reach[v] = true;
            }
            match d {
                Dir::Up if !given[v] => {
                    queue.extend(self.parents[v].iter().map(|&p| (p, Dir::Up)));
                    queue.extend(self.children[v].iter().map(|&c| (c, Dir::Down)));
                }
                Dir::Up => {}
                Dir::Down => {
                    if !given[v] {
                        queue.extend(self.children[v].iter().map(|&c| (c, Dir::Down)));
                    }
                    if opens_collider[v] {
                        queue.extend(self.parents[v].iter().map(|&p| (p, Dir::Up)));
                    }
                }
            }
        }
        reach
    }

    pub(crate) fn d_separated_idx(&self, x: &[usize], y: &[usize], z: &[usize]) -> bool {
        let mut given = vec![false; self.names.len()];
        for &v in z {
            given[v] = true;
        }
        let reach = self.active_reach(x, &given);
        !y.iter().any(|&v| reach[v])
    }

    /// `X ⊥ Y | Z` by the reachability ("Bayes ball") algorithm.
    pub fn d_separated<S: AsRef<str>>(&self, x: &[S], y: &[S], z: &[S]) -> Result<bool, GraphError> {
        let (xi, yi, zi) = (self.indices(x)?, self.indices(y)?, self.indices(z)?);
        self.check_disjoint([&xi, &yi, &zi])?;
        Ok(self.d_separated_idx(&xi, &yi, &zi))
    }

    /// `X ⊥ Y | Z` by separation in the moralized ancestral graph.
    pub fn d_separated_moral<S: AsRef<str>>(&self, x: &[S], y: &[S], z: &[S]) -> Result<bool, GraphError> {
        let (xi, yi, zi) = (self.indices(x)?, self.indices(y)?, self.indices(z)?);
        self.check_disjoint([&xi, &yi, &zi])?;
        let k = self.names.len();
        let all: Vec<usize> = xi.iter().chain(&yi).chain(&zi).copied().collect();
        let keep = self.ancestors_mask(&all);
        let mut adj = vec![Vec::new(); k];
        for v in (0..k).filter(|&v| keep[v]) {
            let ps: Vec<usize> = self.parents[v].iter().copied().filter(|&p| keep[p]).collect();
            for (i, &p) in ps.iter().enumerate() {
                adj[v].push(p);
                adj[p].push(v);
                for &q in &ps[i + 1..] {
                    adj[p].push(q);
                    adj[q].push(p);
                }
            }
        }
        let mut blocked = vec![false; k];
        for &v in &zi {
            blocked[v] = true;
        }
        let mut seen = vec![false; k];
        let mut stack: Vec<usize> = xi.clone();
        for &v in &xi {
            seen[v] = true;
        }
        while let Some(v) = stack.pop() {
            for &u in &adj[v] {
                if !seen[u] && !blocked[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        Ok(!yi.iter().any(|&v| seen[v]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::nine_node;

    const NONE: [&str; 0] = [];

    #[test]
    fn chain_rule() {
        let g = Dag::new(["a", "b", "c"], [("a", "b"), ("b", "c")]).unwrap();
        assert!(g.d_separated(&["a"], &["c"], &["b"]).unwrap());
        assert!(!g.d_separated(&["a"], &["c"], &NONE).unwrap());
        assert!(g.d_separated_moral(&["a"], &["c"], &["b"]).unwrap());
        assert!(!g.d_separated_moral(&["a"], &["c"], &NONE).unwrap());
    }

    #[test]
    fn collider_rule() {
        let g = Dag::new(["a", "b", "c", "d"], [("a", "c"), ("b", "c"), ("c", "d")]).unwrap();
        assert!(g.d_separated(&["a"], &["b"], &NONE).unwrap());
        assert!(!g.d_separated(&["a"], &["b"], &["c"]).unwrap());
        // A descendant of the collider also opens it.
        assert!(!g.d_separated(&["a"], &["b"], &["d"]).unwrap());
        assert!(g.d_separated_moral(&["a"], &["b"], &NONE).unwrap());
        assert!(!g.d_separated_moral(&["a"], &["b"], &["d"]).unwrap());
    }

    #[test]
    fn nine_node_mediator_and_backdoor_blocked() {
        let g = nine_node();
        assert!(g.d_separated(&["x0"], &["y"], &["x1", "x3"]).unwrap());
        assert!(g.d_separated_moral(&["x0"], &["y"], &["x1", "x3"]).unwrap());
        assert!(!g.d_separated(&["x0"], &["y"], &["x3"]).unwrap());
        assert!(!g.d_separated(&["x0"], &["y"], &["x1"]).unwrap());
    }

    #[test]
    fn overlapping_sets_rejected() {
        let g = nine_node();
        assert_eq!(g.d_separated(&["x0"], &["y"], &["x0"]).unwrap_err(), GraphError::OverlappingSets("x0".into()));
        assert!(g.d_separated_moral(&["x1"], &["x1"], &NONE).is_err());
        assert!(matches!(g.d_separated(&["nope"], &["y"], &NONE), Err(GraphError::UnknownNode(_))));
    }
}
