use thiserror::Error;

/// Errors raised by the numerical engine and the scenario front end.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("singular metric (pivot {pivot:e} below threshold)")]
    SingularMetric { pivot: f64 },
    #[error("metric does not have Lorentz signature: {0}")]
    WrongSignature(String),
    #[error("missing jet data: {0}")]
    MissingJet(&'static str),
    #[error("domain error: {0}")]
    DomainError(String),
    #[error(
        "Newton iteration did not converge after {iterations} iterations (residual {residual:e})"
    )]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("singular Jacobian")]
    SingularJacobian,
    #[error("unsupported theory: {0}")]
    UnsupportedTheory(String),
    #[error("operation requires coupling order {expected}, theory has {found}")]
    WrongCouplingOrder { expected: u8, found: u8 },
    #[error("differential index {0} exceeds 1")]
    IndexTooHigh(u8),
    #[error("plane wave violates dispersion relation: {0}")]
    BadDispersion(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("invalid scenario: {0}")]
    Validation(String),
    #[error("unknown check: {0}")]
    UnknownCheck(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
