use std::path::PathBuf;

use simseql_core::ErrorKind;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Engine(#[from] simseql_core::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    /// Malformed data file or cell.
    #[error("{0}")]
    Data(String),
    /// Failure inside a script run on behalf of a statement.
    #[error("{0}")]
    Nested(Box<ScriptError>),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 2 for parse, bind and catalog errors, 3 for
    /// everything that fails while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Engine(e) => match e.kind() {
                ErrorKind::Syntax | ErrorKind::Bind | ErrorKind::Catalog => 2,
                ErrorKind::Runtime => 3,
            },
            CliError::Io { .. } | CliError::Data(_) => 3,
            CliError::Nested(e) => e.exit_code(),
        }
    }
}

/// An error annotated with where in a script it happened.
#[derive(Debug, thiserror::Error)]
#[error("{source_name}:{line}: {error}")]
pub struct ScriptError {
    pub source_name: String,
    /// Line of the statement or directive that failed.
    pub line: u32,
    #[source]
    pub error: CliError,
}

impl ScriptError {
    pub fn exit_code(&self) -> i32 {
        self.error.exit_code()
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
