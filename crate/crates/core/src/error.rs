use std::fmt;

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at {0}")]
    Parse(#[from] ParseError),

    #[error("{source_name}:{line}: {message}")]
    Input { source_name: String, line: usize, message: String },

    #[error("stream order violated at line {line}: time {time} arrived after time {latest} (skew {skew})")]
    StreamOrder { line: usize, time: i64, latest: i64, skew: i64 },

    #[error("interpretation {id}: {source}")]
    Interpretation {
        id: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid mode bias: {0}")]
    Bias(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("no seed of kind {0} in interpretation")]
    NoSeed(crate::logic::HeadKind),

    #[error("insufficient observations: the Hoeffding bound needs n >= 1")]
    InsufficientObservations,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
