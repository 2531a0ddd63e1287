use thiserror::Error;

use crate::family::ClosureWitness;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at `{token}`: {reason}")]
    Parse { token: String, reason: String },

    #[error("ambient variable counts differ ({left} vs {right})")]
    AmbientMismatch { left: usize, right: usize },

    #[error("degree precondition violated: {0}")]
    Degree(String),

    #[error("invalid family: {0}")]
    InvalidFamily(String),

    #[error("level {level}: {source}")]
    AtLevel {
        level: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid generator reference: {0}")]
    InvalidRef(String),

    #[error("family is not closed under comparability ({} witness pair(s))", .0.len())]
    NotClosed(Vec<ClosureWitness>),

    #[error("resource cap exceeded: {what} needs {value}, limit is {limit}")]
    ResourceCap {
        what: &'static str,
        value: u128,
        limit: u128,
    },

    #[error("reduction exceeded {0} steps; the rewriting system is not terminating")]
    StepCap(usize),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(token: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Parse {
            token: token.into(),
            reason: reason.into(),
        }
    }

    /// True for the caps on enumeration size, permutation search and
    /// reduction length.
    pub fn is_resource_cap(&self) -> bool {
        match self {
            Error::ResourceCap { .. } | Error::StepCap(_) => true,
            Error::AtLevel { source, .. } => source.is_resource_cap(),
            _ => false,
        }
    }
}
