//! Error type shared by every stage of the pipeline.

use std::path::PathBuf;

use thiserror::Error;

/// Coarse error classes used to pick the process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    /// Bad flags or an invalid configuration.
    Usage,
    /// Missing, malformed or inconsistent input data.
    Data,
    /// A numerical precondition failed (zero variance, non-finite values, ...).
    Numerical,
}

impl ErrorCategory {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorCategory::Usage => 1,
            ErrorCategory::Data => 2,
            ErrorCategory::Numerical => 3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCategory::Usage => "usage",
            ErrorCategory::Data => "data",
            ErrorCategory::Numerical => "numerical",
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: invalid JSON: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: {message}")]
    Csv { path: PathBuf, message: String },
    #[error("column `{0}` not found in header")]
    MissingColumn(String),
    #[error("row {row}: {message}")]
    MalformedRow { row: usize, message: String },
    #[error("row {row}: timestamp is not strictly greater than the previous row")]
    NonMonotoneTimestamps { row: usize },
    #[error("schema selects no feature columns")]
    NoFeatures,
    #[error("no data rows")]
    EmptyData,
    #[error("channel {channel} (`{name}`) has zero variance over the fitted rows")]
    ZeroVariance { channel: usize, name: String },
    #[error("standardization selection contains no rows")]
    EmptySelection,
    #[error("invalid split: {0}")]
    InvalidSplit(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("series has {len} rows, shorter than window length {window}")]
    SeriesTooShort { len: usize, window: usize },
    #[error("maxscale must be positive, got {0}")]
    InvalidMaxscale(f64),
    #[error("diagram dimensions differ: {left} vs {right}")]
    DiagramDimensionMismatch { left: usize, right: usize },
    #[error("diagram contains a non-finite pair")]
    NonFiniteDiagram,
    #[error("{0} diagram set is empty")]
    EmptyDiagramSet(&'static str),
    #[error("k = {k} is invalid for {train} training windows")]
    InvalidK { k: usize, train: usize },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("empty input")]
    EmptyInput,
    #[error("no run named `{0}`")]
    UnknownRun(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("stage `{stage}`: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn json(path: impl Into<PathBuf>, source: serde_json::Error) -> Self {
        Error::Json {
            path: path.into(),
            source,
        }
    }

    pub fn in_stage(self, stage: impl Into<String>) -> Self {
        Error::Stage {
            stage: stage.into(),
            source: Box::new(self),
        }
    }

    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Stage { source, .. } => source.category(),
            Error::InvalidConfig(_) => ErrorCategory::Usage,
            Error::ZeroVariance { .. } | Error::InvalidMaxscale(_) | Error::NonFiniteDiagram => {
                ErrorCategory::Numerical
            }
            _ => ErrorCategory::Data,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
