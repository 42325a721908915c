use std::path::PathBuf;

use thiserror::Error;

/// Errors of the experiment harness. Each maps to a process exit code.
#[derive(Debug, Error)]
pub enum LabError {
    #[error("config error: {0}")]
    Config(String),

    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("bound violated: {0}")]
    Violation(String),

    #[error(transparent)]
    Numeric(#[from] su2poly::Error),
}

impl LabError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        LabError::Io { path: path.into(), source }
    }

    /// 2 for configuration and I/O problems, 3 for invariant or bound
    /// violations, 4 for numerical failures.
    pub fn exit_code(&self) -> u8 {
        use su2poly::Error as E;
        match self {
            LabError::Config(_) | LabError::Io { .. } | LabError::Csv(_) => 2,
            LabError::Violation(_) => 3,
            LabError::Numeric(e) => match e {
                E::HypothesisViolated { .. } => 3,
                E::Domain(_) | E::InvalidMeasure(_) | E::NotNormalized { .. } | E::Precondition(_) => 2,
                _ => 4,
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
