use std::io;
use std::path::PathBuf;

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const PARSE: i32 = 2;
    pub const VALIDATION: i32 = 3;
    pub const PROPERTY_FAILURE: i32 = 4;
    pub const MISSING_INPUT: i32 = 5;
    /// Filesystem errors that are not about the content of an input.
    pub const IO: i32 = 1;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("missing input: {0}")]
    MissingInput(String),
    #[error("{0}")]
    PropertyFailure(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => exit::PARSE,
            CliError::Validation(_) => exit::VALIDATION,
            CliError::MissingInput(_) => exit::MISSING_INPUT,
            CliError::PropertyFailure(_) => exit::PROPERTY_FAILURE,
            CliError::Io { .. } => exit::IO,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<lqu_core::Error> for CliError {
    fn from(e: lqu_core::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
