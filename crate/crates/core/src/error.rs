use thiserror::Error;

/// Failure modes shared by every module of the engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    /// A principal part with a nonzero `u1^-1` term cannot be realized by an
    /// elliptic function with a single pole.
    #[error("principal part has nonzero residue {residue}; no elliptic function has a single simple pole")]
    OrderOnePole { residue: String },

    #[error("coefficient of u1^{exponent} requested outside the trusted window (trusted through {trusted})")]
    UntrustedWindow { exponent: i64, trusted: String },

    #[error("ill-formed section: {0}")]
    IllFormedSection(String),

    #[error("singular transition: {0}")]
    SingularTransition(String),

    #[error("frame mismatch: {0}")]
    FrameMismatch(String),

    #[error("inconsistent family: {0}")]
    InconsistentFamily(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("arity mismatch: {0}")]
    Arity(String),

    #[error("invalid structure: {0}")]
    InvalidStructure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
