use thiserror::Error;

use crate::presentation::ParseError;

/// Errors surfaced by the group machinery.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    /// Coset enumeration ran out of room. Either the group is infinite or the
    /// limit is too low.
    #[error("coset enumeration aborted at {max_cosets} cosets (possibly infinite or limit too low)")]
    LimitExceeded { max_cosets: usize },

    #[error("coset table is incomplete")]
    IncompleteTable,

    #[error("relator {index} ({relator}) does not map to the identity")]
    RelatorViolation { index: usize, relator: String },

    #[error("homomorphism has not been verified")]
    Unverified,

    #[error("element is not a member of the group")]
    NotMember,

    #[error("subgroup is not normal")]
    NotNormal,

    #[error("{what}: size {size} exceeds the limit {limit}")]
    SizeLimit { what: String, size: u64, limit: u64 },

    #[error("budget exceeded: {required} evaluations required, budget is {budget}")]
    Budget { required: u64, budget: u64 },

    #[error("actions are not compatible: {0}")]
    Incompatible(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    /// An internal consistency check failed. This always indicates a bug.
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

impl Error {
    /// True for errors that come from a resource limit rather than from bad
    /// input or a failed check.
    pub fn is_limit(&self) -> bool {
        matches!(
            self,
            Error::LimitExceeded { .. } | Error::SizeLimit { .. } | Error::Budget { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
