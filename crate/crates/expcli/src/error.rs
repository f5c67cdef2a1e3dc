use serde::Serialize;
use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("unknown experiment `{name}`; known: {}", .known.join(", "))]
    UnknownExperiment { name: String, known: Vec<String> },
    #[error("invalid configuration: {0}")]
    ConfigValidation(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("experiment failed: {0}")]
    Computation(String),
}

impl RunError {
    pub fn config(msg: impl Into<String>) -> Self {
        Self::ConfigValidation(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io { path: path.into(), source }
    }

    /// Stable machine-readable error class.
    pub fn kind(&self) -> &'static str {
        match self {
            Self::UnknownExperiment { .. } => "UnknownExperimentError",
            Self::ConfigValidation(_) => "ConfigValidationError",
            Self::Io { .. } => "IoError",
            Self::Computation(_) => "ComputationError",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::UnknownExperiment { .. } | Self::ConfigValidation(_) => 2,
            Self::Io { .. } => 3,
            Self::Computation(_) => 4,
        }
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Payload<'a> {
            error: &'a str,
            message: String,
        }
        serde_json::to_string(&Payload { error: self.kind(), message: self.to_string() }).expect("error payload serializes")
    }
}

macro_rules! computation_from {
    ($($t:ty),* $(,)?) => {
        $(impl From<$t> for RunError {
            fn from(e: $t) -> Self {
                Self::Computation(e.to_string())
            }
        })*
    };
}

computation_from!(
    causalsim::DatasetError,
    causalsim::scm::ScmError,
    causalsim::graph::GraphError,
    causalsim::estimators::EstimateError,
    causalsim::flexfit::FlexError,
    causalsim::explain::ExplainError,
);
