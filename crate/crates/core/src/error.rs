use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("integration diverged at step {step}: non-finite state")]
    Divergence { step: usize },

    #[error("series too short: need {required} rows, have {available}")]
    Length { required: usize, available: usize },

    #[error("degenerate signal: standard deviation {std:e} below 1e-12")]
    DegenerateSignal { std: f64 },

    #[error("degenerate target: sum of squares {sum_sq:e} below 1e-18")]
    DegenerateTarget { sum_sq: f64 },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("index out of range: {0}")]
    Index(String),

    #[error("singular system: rank {rank} < {cols} columns with lambda = 0")]
    Singular { rank: usize, cols: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown column (node {node}, shift {shift})")]
    UnknownColumn { node: usize, shift: usize },

    #[error("adjacency draw has zero spectral radius after {attempts} attempts")]
    ZeroSpectralRadius { attempts: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    /// True for errors caused by user-supplied configuration rather than a
    /// failure during computation.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::Json(_) | Error::InvalidParameter(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
