use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("qubit reference {triode}.{axis} out of bounds for {triodes} triodes")]
    OutOfBounds {
        triode: usize,
        axis: char,
        triodes: usize,
    },

    #[error("assignment has {got} labels, network has {expected} triodes")]
    LengthMismatch { expected: usize, got: usize },

    #[error("{what}: {requested} triodes exceeds the cap of {cap}; raise the cap to at least {requested}")]
    CapExceeded {
        what: &'static str,
        requested: usize,
        cap: usize,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for refusals caused by an enumeration or simulation cap.
    pub fn is_cap_refusal(&self) -> bool {
        matches!(self, Error::CapExceeded { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
