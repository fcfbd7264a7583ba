use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated a precondition (non-finite value, bad range,
    /// duplicate times, empty grid, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A signal or kernel does not span the time window an operation needs.
    #[error("coverage error: {0}")]
    Coverage(String),

    /// Two objects that must share a time grid do not.
    #[error("alignment error: {0}")]
    Alignment(String),

    /// The closed-form Wigner reference only exists for the lowest two
    /// number states.
    #[error("no analytic Wigner reference for n = {0}; only n = 0 and n = 1 are supported")]
    UnsupportedReference(usize),

    /// A text input (signal CSV, config file, trace CSV) failed to parse.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the CLI: validation failures exit with 2,
    /// i/o and internal errors with 1.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_)
            | Error::Coverage(_)
            | Error::Alignment(_)
            | Error::UnsupportedReference(_)
            | Error::Parse { .. } => 2,
            Error::Io(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
