use thiserror::Error;

use crate::variational::VariationalState;

/// A single violated parameter constraint, keyed by field name.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub field: &'static str,
    pub message: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {}", join_violations(.0))]
    InvalidParams(Vec<Violation>),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("numerical failure at t = {t}: {reason}")]
    NumericalFailure { t: f64, reason: String },

    #[error("propagation failed at t = {t}: {reason}")]
    PropagationFailed {
        last_good: Box<VariationalState>,
        t: f64,
        reason: String,
    },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

impl Error {
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NumericalFailure { .. } | Error::PropagationFailed { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
