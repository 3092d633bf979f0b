use thiserror::Error;

/// Everything that can go wrong in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("axis {axis} out of range for dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },
    #[error("operands live on different symplectic models")]
    ModelMismatch,
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("symmetry violated: {0}")]
    SymmetryViolation(String),
    #[error("connection has torsion; {0} needs a torsion-free connection")]
    Torsion(&'static str),
    #[error("degree-one part is not closed")]
    NotClosed,
    #[error("gauge transformation is not symplectic")]
    NotSymplectic,
    #[error("scaling parameter t must be nonzero")]
    ZeroScaling,
    #[error("descent diverged: {0}")]
    Divergence(String),
    #[error("non-finite value encountered: {0}")]
    NonFinite(String),
    #[error("unknown identity `{name}`; available: {available}")]
    UnknownIdentity { name: String, available: String },
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
    #[error("invalid argument: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parse_err(location: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse { location: location.into(), message: message.into() }
}
