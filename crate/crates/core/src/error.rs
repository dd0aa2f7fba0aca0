use thiserror::Error;

/// Errors raised by the analysis library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A named parameter violates its admissible range.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// A special function was called outside its domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// The result is not representable in the scalar type.
    #[error("overflow: {0}")]
    Overflow(String),

    /// A closed-form branch was evaluated outside its region of validity.
    #[error("branch `{branch}` is not valid here: {reason}")]
    Branch { branch: &'static str, reason: String },

    /// A Monte Carlo slope estimate cannot be formed from the given estimates.
    #[error("degenerate estimate: {0}")]
    Degenerate(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
