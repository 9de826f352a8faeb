use std::path::PathBuf;

use crate::trace::RunTrace;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument is outside the domain an operation is defined on.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// The objective or a certificate became NaN/Inf. Carries the trace up
    /// to the failure point.
    #[error("numerical failure: {msg}")]
    NumericalFailure { msg: String, trace: Box<RunTrace> },

    /// Repeated halving drove the error-bound estimate below the floor.
    #[error("error-bound estimate fell below floor {floor:e} at stage {stage}")]
    MuFloor {
        stage: usize,
        floor: f64,
        trace: Box<RunTrace>,
    },

    #[error("prox-gradient budget of {budget} evaluations exhausted")]
    BudgetExceeded {
        budget: usize,
        best: Vec<f64>,
        trace: Box<RunTrace>,
    },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Trace attached to solver failures, if any.
    pub fn trace(&self) -> Option<&RunTrace> {
        match self {
            Error::NumericalFailure { trace, .. }
            | Error::MuFloor { trace, .. }
            | Error::BudgetExceeded { trace, .. } => Some(trace),
            _ => None,
        }
    }
}

pub(crate) fn check_dim(context: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch {
            context,
            expected,
            got,
        });
    }
    Ok(())
}
