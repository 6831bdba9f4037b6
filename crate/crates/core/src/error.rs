use std::fmt;

/// Position of a token in query text, 1-based line and column.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pos {
    pub line: u32,
    pub column: u32,
    /// Byte offset from the start of the text.
    pub offset: usize,
}

impl Pos {
    pub fn new(line: u32, column: u32, offset: usize) -> Self {
        Pos {
            line,
            column,
            offset,
        }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.column)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    /// Lexical or grammatical error in query text.
    Syntax,
    /// Name resolution, type checking or method/parameter compatibility.
    Bind,
    /// Registry violations: duplicate names, unknown types, ineligible indexes.
    Catalog,
    /// Failures while evaluating a plan or storing data.
    Runtime,
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("syntax error at {pos}: {message}")]
    Syntax {
        pos: Pos,
        message: String,
        /// Tokens the parser would have accepted at `pos`.
        expected: Vec<String>,
    },
    #[error("{}{message}", pos.map(|p| format!("binding error at {p}: ")).unwrap_or_else(|| "binding error: ".to_string()))]
    Bind { pos: Option<Pos>, message: String },
    #[error("catalog error: {0}")]
    Catalog(String),
    #[error("runtime error: {0}")]
    Runtime(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Syntax { .. } => ErrorKind::Syntax,
            Error::Bind { .. } => ErrorKind::Bind,
            Error::Catalog(_) => ErrorKind::Catalog,
            Error::Runtime(_) => ErrorKind::Runtime,
        }
    }

    pub fn position(&self) -> Option<Pos> {
        match self {
            Error::Syntax { pos, .. } => Some(*pos),
            Error::Bind { pos, .. } => *pos,
            _ => None,
        }
    }

    /// Shifts the reported position by `lines`, for statements embedded in
    /// a larger script.
    pub fn shifted(self, lines: u32) -> Self {
        match self {
            Error::Syntax {
                mut pos,
                message,
                expected,
            } => {
                pos.line += lines;
                Error::Syntax {
                    pos,
                    message,
                    expected,
                }
            }
            Error::Bind { pos, message } => Error::Bind {
                pos: pos.map(|mut p| {
                    p.line += lines;
                    p
                }),
                message,
            },
            other => other,
        }
    }

    pub(crate) fn bind(pos: Option<Pos>, message: impl Into<String>) -> Self {
        Error::Bind {
            pos,
            message: message.into(),
        }
    }

    /// Reports a position-less error as a binding error at `pos`.
    pub(crate) fn at(self, pos: Pos) -> Self {
        match self {
            Error::Bind { pos: None, message } | Error::Catalog(message) | Error::Runtime(message) => Error::Bind {
                pos: Some(pos),
                message,
            },
            other => other,
        }
    }

    pub(crate) fn catalog(message: impl Into<String>) -> Self {
        Error::Catalog(message.into())
    }

    pub(crate) fn runtime(message: impl Into<String>) -> Self {
        Error::Runtime(message.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
