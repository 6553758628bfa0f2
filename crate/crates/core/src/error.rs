use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("exact result needs {bits} bits, limit is {limit}")]
    BitLimitExceeded { bits: u64, limit: u64 },
    #[error("operands are in different precision modes")]
    ModeMismatch,
    #[error("floating-point result is not finite")]
    NonFinite,
    #[error("degenerate step: numerator vanished on state {0}")]
    DegenerateStep(String),
    #[error("not in Todd form: {0}")]
    NotToddForm(String),
    #[error("cannot normalize: {0}")]
    NotNormalizable(String),
    #[error("exact mode unsupported: {0}")]
    ExactModeUnsupported(String),
    #[error("value must be strictly positive: {0}")]
    NonPositive(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("candidate is not positive at {0}")]
    CandidateNotPositive(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("cannot parse {input:?} as a number: {reason}")]
    Parse { input: String, reason: String },
}
