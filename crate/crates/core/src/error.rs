//! Error types shared across the crate.
//!
//! Every fallible operation returns [`Error`]. The [`ErrorKind`] projection
//! groups variants into the coarse classes the CLI maps to exit codes:
//! configuration problems, bad input data, and degenerate mathematics.

use thiserror::Error;

/// Coarse error class, used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Invalid configuration (flags, config file, date ranges).
    Config,
    /// Input data is missing, malformed, or insufficient.
    Data,
    /// The mathematics is undefined or degenerate on this input.
    Math,
    /// Filesystem or serialization failure.
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("required column '{column}' not found in CSV header")]
    MissingColumn { column: String },

    #[error("row {row}: {message}")]
    Row { row: usize, message: String },

    #[error("duplicate date {date} in series '{symbol}'")]
    DuplicateDate { symbol: String, date: chrono::NaiveDate },

    #[error("date range {start}..{end} leaves no records for '{symbol}'")]
    EmptyRange {
        symbol: String,
        start: chrono::NaiveDate,
        end: chrono::NaiveDate,
    },

    #[error("invalid date range: start {start} is after end {end}")]
    InvalidRange { start: chrono::NaiveDate, end: chrono::NaiveDate },

    #[error("{context}: need at least {needed} records, got {got}")]
    InsufficientData {
        context: String,
        needed: usize,
        got: usize,
    },

    #[error("degenerate price in series '{symbol}': {message}")]
    DegeneratePrice { symbol: String, message: String },

    #[error("{0}")]
    Validation(String),

    #[error("operation requires matrix at stage {expected}, got {got}")]
    StageMismatch { expected: String, got: String },

    #[error(
        "minimization transform undefined for criterion '{criterion}', alternative '{alternative}': value {value} is not strictly positive"
    )]
    MinTransform {
        criterion: String,
        alternative: String,
        value: f64,
    },

    #[error("cannot normalize criterion '{criterion}': column is all zero")]
    ZeroColumn { criterion: String },

    #[error("criterion '{criterion}' has a negative entry ({value}); entropy probabilities are undefined")]
    NegativeEntry { criterion: String, value: f64 },

    #[error("{method} weights degenerate: {message}")]
    DegenerateWeights { method: String, message: String },

    #[error("criterion '{criterion}' is constant; Pearson correlation is undefined")]
    ConstantColumn { criterion: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("ranking degenerate: ideal and anti-ideal coincide on every criterion")]
    DegenerateRanking,

    #[error("rankings cover different alternative sets: {message}")]
    MismatchedAlternatives { message: String },

    #[error("no data file found for symbol '{symbol}' under {dir}")]
    UnknownSymbol { symbol: String, dir: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{stage} failed for {subject}: {source}")]
    Stage {
        stage: String,
        subject: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Wrap an error with the pipeline stage and subject (symbol, criterion,
    /// window) it occurred in.
    pub fn in_stage(self, stage: &str, subject: &str) -> Self {
        Error::Stage {
            stage: stage.to_string(),
            subject: subject.to_string(),
            source: Box::new(self),
        }
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Config(_) | Error::InvalidRange { .. } => ErrorKind::Config,
            Error::MissingColumn { .. }
            | Error::Row { .. }
            | Error::DuplicateDate { .. }
            | Error::EmptyRange { .. }
            | Error::InsufficientData { .. }
            | Error::UnknownSymbol { .. }
            | Error::Validation(_) => ErrorKind::Data,
            Error::DegeneratePrice { .. }
            | Error::StageMismatch { .. }
            | Error::MinTransform { .. }
            | Error::ZeroColumn { .. }
            | Error::NegativeEntry { .. }
            | Error::DegenerateWeights { .. }
            | Error::ConstantColumn { .. }
            | Error::DimensionMismatch { .. }
            | Error::DegenerateRanking
            | Error::MismatchedAlternatives { .. } => ErrorKind::Math,
            Error::Io(_) | Error::Csv(_) | Error::Json(_) => ErrorKind::Io,
            Error::Stage { source, .. } => source.kind(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
