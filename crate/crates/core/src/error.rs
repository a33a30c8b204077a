use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("branching number must be at least 2, got {0}")]
    InvalidBranching(u32),

    #[error("negative index {name} = {value}")]
    NegativeIndex { name: &'static str, value: i64 },

    #[error("symbol {symbol} out of range for alphabet size {alphabet}")]
    SymbolOutOfRange { symbol: u32, alphabet: u32 },

    #[error("boundary anchor at horocycle {anchor_hor} is too shallow: confluent lies at horocycle {confluent_hor}")]
    InsufficientDepth { anchor_hor: i64, confluent_hor: i64 },

    #[error("horocycle indices must sum to zero, got {0} + {1}")]
    HorocycleMismatch(i64, i64),

    #[error("group operations need q = r, got q = {q}, r = {r}")]
    ColorMismatch { q: u32, r: u32 },

    #[error("count overflow: {0}")]
    Overflow(String),

    #[error("invalid measure at `{key}`: {reason}")]
    InvalidMeasure { key: String, reason: String },

    #[error("no sign change of phi(c) - 1 found for |c| <= {limit}")]
    NoBracket { limit: f64 },

    #[error("conjugation needs phi(c0) = 1, got phi({c0}) = {phi}")]
    NotStochastic { c0: f64, phi: f64 },

    #[error("walk is outside the classified cases: {0}")]
    Unclassifiable(String),

    #[error("power iteration stalled after {iterations} sweeps, residual {residual:e}")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("index {index} exceeds coefficient truncation {truncation}")]
    TruncationExceeded { index: u64, truncation: usize },

    #[error("class table would exceed the memory cap of {cap} classes")]
    DepthExceeded { cap: usize },

    #[error("walk did not settle on a boundary point within {steps} steps")]
    Unconverged { steps: usize },

    #[error("schema error at `{path}`: {reason}")]
    Schema { path: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn schema(path: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Schema {
            path: path.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn measure(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidMeasure {
            key: key.into(),
            reason: reason.into(),
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Schema { .. } | Error::Json(_) | Error::InvalidMeasure { .. } => 2,
            Error::InvalidBranching(_)
            | Error::NegativeIndex { .. }
            | Error::SymbolOutOfRange { .. }
            | Error::HorocycleMismatch(..)
            | Error::ColorMismatch { .. } => 3,
            Error::InsufficientDepth { .. } | Error::TruncationExceeded { .. } => 4,
            Error::NoBracket { .. } | Error::NotStochastic { .. } | Error::Unclassifiable(_) => 5,
            Error::NoConvergence { .. } => 6,
            Error::DepthExceeded { .. } | Error::Overflow(_) => 7,
            Error::Unconverged { .. } => 8,
            Error::Io(_) | Error::Csv(_) => 9,
        }
    }
}
