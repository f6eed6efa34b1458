use thiserror::Error;

use crate::analytics::AgentPlan;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("instance must contain at least one element")]
    EmptyInstance,

    #[error("elements must be positive (got {0})")]
    NonPositiveElement(i64),

    #[error("instance too large for oracle: {what} = {value} exceeds {limit}")]
    TooLarge {
        what: &'static str,
        value: u64,
        limit: u64,
    },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("path count overflow at m = {m}, i = {i} for Z = {z}")]
    Overflow { z: usize, m: usize, i: usize },

    #[error("no error paths exist at zero pass-junction error probability")]
    NoErrorPaths,

    #[error("agent planner did not converge after {iterations} iterations (last n_i = {})", .last.n_i)]
    NotConverged {
        iterations: usize,
        last: Box<AgentPlan>,
    },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
