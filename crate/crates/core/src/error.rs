use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("not found: {0}")]
    NotFound(String),

    /// Layout state does not match the graph it is being stepped against.
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("metric undefined: {0}")]
    UndefinedMetric(String),

    #[error("degenerate layout: {0}")]
    DegenerateLayout(String),

    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),

    /// Malformed document text. Line and column are 1-based.
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    /// Well-formed document that violates the schema or a graph invariant.
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },

    #[error("unsupported format version {found:?} (supported: {supported})")]
    UnsupportedVersion { found: String, supported: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            path: path.into(),
            message: message.into(),
        }
    }

    /// True for errors caused by bad user-provided data rather than a runtime failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_)
                | Error::NotFound(_)
                | Error::InvalidSpec(_)
                | Error::Parse { .. }
                | Error::Schema { .. }
                | Error::UnsupportedVersion { .. }
        )
    }
}
