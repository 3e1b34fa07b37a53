use thiserror::Error;

use crate::model::{ActionId, StateId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Why a single transition row was rejected.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum RowError {
    #[error("row has {actual} entries, expected {expected}")]
    WrongLength { expected: usize, actual: usize },
    #[error("probability for state {target} is not finite ({value})")]
    NonFinite { target: StateId, value: f64 },
    #[error("negative probability {value} for state {target}")]
    Negative { target: StateId, value: f64 },
    #[error("probabilities sum to {sum}, expected 1")]
    BadSum { sum: f64 },
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("state {state}, action {action}: {source}")]
    InvalidRow {
        state: StateId,
        action: ActionId,
        #[source]
        source: RowError,
    },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("instance too large: {policies} Markov policies exceed the cap of {cap}")]
    InstanceTooLarge { policies: String, cap: u64 },

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("validation failed: {0}")]
    Validation(String),
}

impl Error {
    pub(crate) fn invalid_argument(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
