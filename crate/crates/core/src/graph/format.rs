//! Edge-list text format and Graphviz output.
//!
//! ```text
//! # comments start with '#'
//! nodes: a b c        # optional, declares isolated nodes
//! observed: a b       # optional; when present, unlisted nodes are hidden
//! a b                 # edge a -> b
//! ```

use super::{Dag, GraphError};
use std::fmt::Write;

impl Dag {
    pub fn parse_edge_list(text: &str) -> Result<Self, GraphError> {
        let mut nodes: Vec<String> = Vec::new();
        let mut edges = Vec::new();
        let mut observed: Option<Vec<String>> = None;
        let declare = |n: &str, nodes: &mut Vec<String>| {
            if !nodes.iter().any(|x| x == n) {
                nodes.push(n.to_string());
            }
        };
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("nodes:") {
                rest.split_whitespace().for_each(|n| declare(n, &mut nodes));
            } else if let Some(rest) = line.strip_prefix("observed:") {
                observed.get_or_insert_with(Vec::new).extend(rest.split_whitespace().map(String::from));
            } else {
                let parts: Vec<&str> = line.split_whitespace().collect();
                let [p, c] = parts[..] else {
                    return Err(GraphError::Parse { line: lineno + 1, message: format!("expected `parent child`, got `{line}`") });
                };
                declare(p, &mut nodes);
                declare(c, &mut nodes);
                edges.push((p.to_string(), c.to_string()));
            }
        }
        let mut dag = Dag::new(nodes, edges)?;
        if let Some(obs) = observed {
            for o in &obs {
                dag.idx(o)?;
            }
            let hidden: Vec<String> = dag.names.iter().filter(|n| !obs.contains(n)).cloned().collect();
            dag = dag.with_unobserved(&hidden)?;
        }
        Ok(dag)
    }

    pub fn to_edge_list(&self) -> String {
        let mut out = format!("nodes: {}\n", self.names.join(" "));
        for (p, c) in self.edges() {
            let _ = writeln!(out, "{p} {c}");
        }
        let obs: Vec<&str> = self.names.iter().zip(&self.observed).filter(|(_, &o)| o).map(|(n, _)| n.as_str()).collect();
        let _ = writeln!(out, "observed: {}", obs.join(" "));
        out
    }

    /// Graphviz `digraph`; hidden nodes are dashed.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph causal {\n");
        for (n, &o) in self.names.iter().zip(&self.observed) {
            if o {
                let _ = writeln!(out, "  \"{n}\";");
            } else {
                let _ = writeln!(out, "  \"{n}\" [style=dashed];");
            }
        }
        for (p, c) in self.edges() {
            let _ = writeln!(out, "  \"{p}\" -> \"{c}\";");
        }
        out.push_str("}\n");
        out
    }
}
