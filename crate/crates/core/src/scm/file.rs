//! Plain-text model definition files.
//!
//! A model file is a TOML document with one `[[node]]` table per assignment:
//!
//! ```toml
//! [[node]]
//! name = "x0"
//! parents = ["x4", "x2"]
//! weights = [1.0, -2.0]
//! intercept = 0.0
//! scale = 0.2
//! noise = { kind = "gaussian", mean = 0.0, sd = 1.0 }
//! ```
//!
//! `parents`, `weights` default to empty, `intercept` to 0 and `scale` to 1.
//! Noise kinds are `gaussian {mean, sd}`, `uniform {lo, hi}` and
//! `constant {value}`. Only linear assignments can be written.

use super::{AssignmentKind, ModelSpec, NoiseDist, NoiseSpec, ScmError, StructuralAssignment, StructuralModel};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ModelFileError {
    #[error("cannot parse model file: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("cannot write model file: {0}")]
    Write(#[from] toml::ser::Error),
    #[error("node `{0}` has a custom mechanism and cannot be written")]
    CustomAssignment(String),
    #[error(transparent)]
    Invalid(#[from] ScmError),
}

/// One `[[node]]` table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeRecord {
    pub name: String,
    #[serde(default)]
    pub parents: Vec<String>,
    #[serde(default)]
    pub weights: Vec<f64>,
    #[serde(default)]
    pub intercept: f64,
    #[serde(default = "one")]
    pub scale: f64,
    pub noise: NoiseDist,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    node: Vec<NodeRecord>,
}

impl StructuralModel {
    pub fn from_toml_str(text: &str) -> Result<Self, ModelFileError> {
        let file: ModelFile = toml::from_str(text)?;
        let mut spec = ModelSpec::new();
        for r in file.node {
            spec.push(
                r.name,
                StructuralAssignment {
                    parents: r.parents,
                    kind: AssignmentKind::Linear { weights: r.weights, intercept: r.intercept },
                    noise: NoiseSpec { dist: r.noise, scale: r.scale },
                },
            );
        }
        Ok(spec.validate()?)
    }

    pub fn to_records(&self) -> Result<Vec<NodeRecord>, ModelFileError> {
        self.names
            .iter()
            .zip(&self.assignments)
            .map(|(name, a)| match &a.kind {
                AssignmentKind::Linear { weights, intercept } => Ok(NodeRecord {
                    name: name.clone(),
                    parents: a.parents.clone(),
                    weights: weights.clone(),
                    intercept: *intercept,
                    scale: a.noise.scale,
                    noise: a.noise.dist,
                }),
                AssignmentKind::Custom(_) => Err(ModelFileError::CustomAssignment(name.clone())),
            })
            .collect()
    }

    pub fn to_toml_string(&self) -> Result<String, ModelFileError> {
        Ok(toml::to_string(&ModelFile { node: self.to_records()? })?)
    }
}
