use thiserror::Error;

use crate::solver::SolverError;

/// Errors raised while building, solving or post-processing models.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("invalid design: {0}")]
    InvalidDesign(String),

    #[error("period {start}..={end} overlaps an earlier splice at {other_start}..={other_end}")]
    Overlap {
        start: usize,
        end: usize,
        other_start: usize,
        other_end: usize,
    },

    #[error("{location}: {message}")]
    Parse { location: String, message: String },

    #[error("problem too large: {variables} variables exceeds the budget of {budget}")]
    SizeLimit { variables: usize, budget: usize },

    #[error("solver failed on {context}: {source}")]
    Solver {
        context: String,
        #[source]
        source: SolverError,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn solver(context: impl Into<String>, source: SolverError) -> Self {
        Error::Solver {
            context: context.into(),
            source,
        }
    }

    pub fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
