use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse classification of failures, used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Usage,
    Data,
    Numeric,
}

impl ErrorClass {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorClass::Usage => "usage",
            ErrorClass::Data => "data",
            ErrorClass::Numeric => "numeric",
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv parse error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("empty file: no header row")]
    EmptyFile,
    #[error("target column `{0}` not found")]
    MissingTarget(String),
    #[error("ragged row at line {line}: expected {expected} fields, found {found}")]
    RaggedRow { line: u64, expected: usize, found: usize },
    #[error("duplicate column name `{0}`")]
    DuplicateColumn(String),
    #[error("value `{value}` in ordinal column `{column}` is not a declared category")]
    UnknownOrdinal { column: String, value: String },
    #[error("dataset has no rows")]
    EmptyData,
    #[error("schema mismatch at column `{column}`: {reason}")]
    SchemaMismatch { column: String, reason: String },
    #[error("label `{0}` was not seen when fitting")]
    UnseenLabel(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("at least two classes are required, found {0}")]
    TooFewClasses(usize),
    #[error("degenerate pair dataset: all {count} pairs are {kind}")]
    DegeneratePairs { count: usize, kind: &'static str },
    #[error("class prior is 1 for class {0}; enable prior smoothing")]
    DegeneratePrior(usize),
    #[error("invalid probability vector: {0}")]
    InvalidDistribution(String),
    #[error("class {class} has {count} members, fewer than {folds} folds")]
    Stratification { class: String, count: usize, folds: usize },
    #[error("unsupported model document: {0}")]
    ModelFormat(String),
    #[error("repeat {repeat}, fold {fold}: {source}")]
    Fold {
        repeat: usize,
        fold: usize,
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

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::InvalidParameter(_) => ErrorClass::Usage,
            Error::TooFewClasses(_)
            | Error::DegeneratePairs { .. }
            | Error::DegeneratePrior(_)
            | Error::InvalidDistribution(_) => ErrorClass::Numeric,
            Error::Fold { source, .. } => source.class(),
            _ => ErrorClass::Data,
        }
    }
}
