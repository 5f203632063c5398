use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain an operation accepts.
    #[error("domain error: {0}")]
    Domain(String),

    /// The environment broke the game contract at a given round (1-based).
    #[error("protocol error at round {round}: {message}")]
    Protocol { round: usize, message: String },

    /// Observed data is not consistent with any hypothesis of the class.
    #[error("non-realizable data: {0}")]
    NonRealizable(String),

    /// A construction (extension, parameter set, tree) could not be built.
    #[error("construction error: {0}")]
    Construction(String),

    /// An operation's precondition does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A computation exceeded its work budget; `partial` is the best value found so far.
    #[error("resource budget exceeded: {message} (best so far: {partial})")]
    Resource { message: String, partial: f64 },

    /// Reading or writing an external file format failed.
    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Format(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Format(e.to_string())
    }
}
