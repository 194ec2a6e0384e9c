use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse error class, used for process exit codes and the C ABI status codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorCategory {
    Config,
    Data,
    Numeric,
}

impl ErrorCategory {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorCategory::Config => 2,
            ErrorCategory::Data => 3,
            ErrorCategory::Numeric => 4,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCategory::Config => "config",
            ErrorCategory::Data => "data",
            ErrorCategory::Numeric => "numeric",
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("incompatible inputs: {0}")]
    Incompatible(String),

    #[error("sample too small: need at least {required} curves, got {actual}")]
    SampleTooSmall { required: usize, actual: usize },

    #[error("empty sample")]
    EmptySample,

    #[error("insufficient history: index {n} with window length {k}{}", node_suffix(.node))]
    InsufficientHistory {
        n: usize,
        k: usize,
        node: Option<String>,
    },

    #[error("insufficient data: series length {len} must exceed window length {k}")]
    InsufficientData { len: usize, k: usize },

    #[error("incomplete hierarchy data: {0}")]
    IncompleteData(String),

    #[error("invalid hierarchy: {0}")]
    InvalidHierarchy(String),

    #[error("kernel norm {norm} is not below 1; the FAR(1) recursion has no stationary solution")]
    NonstationaryKernel { norm: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("shape mismatch in node `{node}`: {detail}")]
    ShapeMismatch { node: String, detail: String },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn node_suffix(node: &Option<String>) -> String {
    match node {
        Some(id) => format!(" at node `{id}`"),
        None => String::new(),
    }
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::InvalidHierarchy(_) | Error::Parse { .. } | Error::Io { .. } => {
                ErrorCategory::Config
            }
            Error::InvalidGrid(_)
            | Error::InvalidCurve(_)
            | Error::Incompatible(_)
            | Error::IncompleteData(_)
            | Error::ShapeMismatch { .. }
            | Error::InsufficientHistory { .. }
            | Error::InsufficientData { .. }
            | Error::SampleTooSmall { .. }
            | Error::EmptySample => ErrorCategory::Data,
            Error::NonstationaryKernel { .. } | Error::Domain(_) => ErrorCategory::Numeric,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.into(),
        }
    }
}
