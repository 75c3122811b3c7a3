use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: expected {expected}, got {got} ({context})")]
    InvalidDimension {
        expected: usize,
        got: usize,
        context: &'static str,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The operator mapped a nonzero vector to zero (e.g. all-zero observations).
    #[error("degenerate operator: {0}")]
    DegenerateOperator(String),

    #[error("numerical divergence: non-finite iterate at iteration {iteration}")]
    NumericalDivergence { iteration: usize },

    #[error("ill-conditioned least-squares subproblem: relative residual {relative_residual:e} after {iterations} CG iterations")]
    IllConditionedSystem {
        relative_residual: f64,
        iterations: usize,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn dim(expected: usize, got: usize, context: &'static str) -> Self {
        Error::InvalidDimension {
            expected,
            got,
            context,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
