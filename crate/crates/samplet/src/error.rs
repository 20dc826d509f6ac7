use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("row {row}: expected {expected} columns, found {found}")]
    RaggedRow { row: usize, expected: usize, found: usize },
    #[error("row {row}, column {column}: cannot parse {text:?} as a number")]
    BadCell { row: usize, column: usize, text: String },
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("no data rows")]
    NoData,
    #[error("malformed operator file: {0}")]
    OperatorFormat(String),
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("invalid setting: {0}")]
    Setting(String),
    #[error("{what} of {requested} exceeds the budget of {budget}")]
    Budget {
        what: &'static str,
        requested: usize,
        budget: usize,
    },
    #[error(transparent)]
    Core(#[from] samplet_core::Error),
    #[error("JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
