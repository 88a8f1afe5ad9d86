use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("p must be prime (got {0})")]
    NotPrime(u64),

    #[error("operands live in different rings: {left} vs {right}")]
    ContextMismatch { left: String, right: String },

    #[error("{value} is not a unit modulo {modulus}")]
    NonUnit { value: String, modulus: String },

    #[error("divisor polynomial is not monic")]
    NotMonic,

    #[error("arithmetic overflow: {0}")]
    Overflow(String),

    #[error("minimal degree {degree} exceeds the degree cap {cap}")]
    CapExceeded { degree: usize, cap: usize },

    #[error("witness failed exhaustive re-verification at x = {x}")]
    VerificationFailure { x: String },

    #[error("self-check of {what} failed at x = {x}")]
    SelfCheckFailed { what: String, x: String },

    #[error("enumeration guard exceeded: {work} > {limit}")]
    GuardExceeded { work: String, limit: String },

    #[error("malformed record: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
