use std::path::PathBuf;

use chrono::NaiveDate;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("lexicon {0} contains no terms")]
    EmptyLexicon(String),

    #[error("invalid term {0:?}: terms must contain at least one alphanumeric token")]
    InvalidTerm(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid time series: {0}")]
    InvalidSeries(String),

    #[error("need at least {needed} observations, got {got}")]
    InsufficientLength { needed: usize, got: usize },

    #[error("non-positive value {value} at {date}")]
    NonPositive { date: NaiveDate, value: f64 },

    #[error("series has zero variance")]
    ZeroVariance,

    #[error("series share no common dates")]
    EmptyIntersection,

    #[error("design matrix is rank deficient: column {column} is a linear combination of earlier columns")]
    RankDeficient { column: usize },

    #[error("no term passed the correlation filter at alpha = {alpha}")]
    NoTermsSelected { alpha: f64 },

    #[error("actual value at index {index} is zero; percentage error undefined")]
    ZeroActual { index: usize },

    #[error("insufficient history: {0}")]
    InsufficientHistory(String),

    #[error("refit for {date} failed: {source}")]
    Refit {
        date: NaiveDate,
        #[source]
        source: Box<Error>,
    },

    #[error("unknown series {0:?}")]
    UnknownSeries(String),

    #[error("config: {0}")]
    Config(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn stage(stage: impl Into<String>, source: Error) -> Self {
        Error::Stage {
            stage: stage.into(),
            source: Box::new(source),
        }
    }

    /// True for failures caused by bad configuration or unreadable input,
    /// as opposed to failures inside a computation.
    pub fn is_input_error(&self) -> bool {
        match self {
            Error::Io { .. }
            | Error::Parse { .. }
            | Error::EmptyLexicon(_)
            | Error::InvalidTerm(_)
            | Error::UnknownSeries(_)
            | Error::Config(_) => true,
            Error::Stage { source, .. } | Error::Refit { source, .. } => source.is_input_error(),
            _ => false,
        }
    }
}
