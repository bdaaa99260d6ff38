use thiserror::Error;

/// Errors raised by the engine.
///
/// Check failures are never reported through this type; they live in the
/// report structures. `Error` covers malformed arguments, input files and
/// exhausted resource limits.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("argument error: {0}")]
    Argument(String),

    #[error("pair mismatch: {0}")]
    PairMismatch(String),

    #[error("element is not homogeneous: {0}")]
    NotHomogeneous(String),

    #[error("wrong tensor degree: expected {expected}, found {found}")]
    WrongDegree { expected: i64, found: String },

    #[error("cotensor is not closed, d(omega) = {witness}")]
    NotClosed { witness: String },

    #[error("tensor is not symplectic, d(i_x omega) = {witness}")]
    NotSymplectic { witness: String },

    #[error("not a cocycle, residual i_x omega - df = {residual}")]
    NotACocycle { residual: String },

    #[error("cocycle is not coefficient-homogeneous; slice linear algebra needs a homogeneous omega")]
    InhomogeneousCocycle,

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
