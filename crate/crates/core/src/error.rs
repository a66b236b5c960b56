use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Transport or protocol failure reported by a search backend.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message}")]
pub struct BackendError {
    pub message: String,
    /// Whether retrying the same query later may succeed (rate limits, 5xx, timeouts).
    pub retryable: bool,
}

impl BackendError {
    pub fn new(message: impl Into<String>, retryable: bool) -> Self {
        Self {
            message: message.into(),
            retryable,
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("query phrase is empty")]
    EmptyPhrase,

    #[error("query budget exhausted: {used}/{daily_limit} queries used on {day}")]
    BudgetExhausted {
        daily_limit: u64,
        used: u64,
        day: String,
    },

    #[error("search backend failed (retryable: {}): {0}", .0.retryable)]
    Backend(#[from] BackendError),

    #[error("malformed url: {0:?}")]
    MalformedUrl(String),

    #[error("an actor cannot be paired with itself: {0}")]
    SelfPair(String),

    #[error("relation between {0} and {1} was not detected")]
    NotDetected(String, String),

    #[error("keyword is empty")]
    EmptyKeyword,

    #[error("no keyword available for actor {0}")]
    MissingKeyword(String),

    #[error("detected pair {0} -- {1} has no strength score")]
    MissingScore(String, String),

    #[error("duplicate actor id {0:?}")]
    DuplicateActor(String),

    #[error("invalid actor name {0:?}")]
    InvalidActor(String),

    #[error("at least two actors are required, got {0}")]
    TooFewActors(usize),

    #[error("invalid corpus at line {line}: {reason}")]
    InvalidCorpus { line: usize, reason: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    pub(crate) fn json(context: impl Into<String>, source: serde_json::Error) -> Self {
        Error::Json {
            context: context.into(),
            source,
        }
    }
}
