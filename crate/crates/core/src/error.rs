use thiserror::Error;

/// Broad classification used to map failures onto process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Parse,
    Computation,
    Precondition,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid field `{field}`: {message}")]
    Field { field: String, message: String },
    #[error("duplicate point: {0}")]
    DuplicatePoint(String),
    #[error("series/point mismatch: {0}")]
    SeriesMismatch(String),
    #[error("unknown point id {0}")]
    UnknownPoint(u32),
    #[error("pole at the marked point {0}")]
    PoleAtPoint(String),
    #[error("zero denominator polynomial")]
    ZeroDenominator,
    #[error("pole {0} is not strictly inside the domain")]
    PoleNotInside(String),
    #[error("evaluation point coincides with the pole")]
    AtPole,
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),
    #[error("zero scaling for point {0}")]
    ZeroScaling(u32),
    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("insufficient truncation: {0}")]
    InsufficientOrder(String),
    #[error("linear program: {0}")]
    Lp(String),
}

impl Error {
    pub fn field(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Field {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Io { .. }
            | Error::Json { .. }
            | Error::Field { .. }
            | Error::DuplicatePoint(_)
            | Error::SeriesMismatch(_)
            | Error::UnknownPoint(_) => ErrorKind::Parse,
            Error::InvalidStrategy(_) | Error::Precondition(_) | Error::InsufficientOrder(_) => {
                ErrorKind::Precondition
            }
            _ => ErrorKind::Computation,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
