use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed line-oriented text input.
    #[error("{source_name}:{line}:{column}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        column: usize,
        message: String,
    },

    /// Malformed WordNet database file.
    #[error("{file} at byte {offset}: {message}")]
    WordNet {
        file: String,
        offset: u64,
        message: String,
    },

    #[error("invalid input: {0}")]
    Validation(String),

    #[error("unknown column `{0}`")]
    UnknownColumn(String),

    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("background knowledge violated: {0}")]
    Constraint(String),

    #[error("empty population")]
    EmptyPopulation,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(source_name: &str, line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            source_name: source_name.to_string(),
            line,
            column,
            message: message.into(),
        }
    }
}
