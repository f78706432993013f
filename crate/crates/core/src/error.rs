use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("record `{id}`: difficulty {value} outside [0, 1]")]
    DifficultyOutOfRange { id: String, value: f64 },

    #[error("invalid binning: bin count {0} (need at least 4)")]
    InvalidBinning(usize),

    #[error("degenerate distribution: {0}")]
    DegenerateDistribution(&'static str),

    #[error("invalid counts: {0}")]
    InvalidCounts(String),

    #[error("infeasible thresholds b={b}, t={t} for {bins} bins (need b + t <= {max})", max = bins.saturating_sub(2))]
    InvalidThreshold { b: usize, t: usize, bins: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("constant distribution: max equals min after clipping")]
    ConstantDistribution,

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("vector `{0}` is not a probability distribution")]
    NotADistribution(&'static str),

    #[error("KL divergence undefined: q[{0}] is zero where p is positive")]
    UnboundedDivergence(usize),

    #[error("strategy `{0}` has no predefined shape")]
    UnknownShape(String),

    #[error("class `{class}`: pool holds {available} records but ipc is {ipc}")]
    InsufficientPool {
        class: String,
        available: usize,
        ipc: usize,
    },

    #[error("class `{class}`: no donor bin available for a deficit of {deficit}")]
    NoDonor { class: String, deficit: usize },

    #[error("class `{0}` is present in the original manifest but missing from the pool")]
    MissingClass(String),

    #[error("class `{0}` has no selected records")]
    EmptyClass(String),

    #[error("synthetic spec infeasible: {0}")]
    SpecInfeasible(String),

    #[error("{path}:{line}: {reason}")]
    Parse {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("{path}:{line}: duplicate id `{id}` (first seen on line {first})")]
    DuplicateId {
        path: PathBuf,
        line: usize,
        first: usize,
        id: String,
    },

    #[error("{field}: {reason}")]
    Config { field: String, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable tag, used by the CLI's structured error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DifficultyOutOfRange { .. } => "difficulty_out_of_range",
            Error::InvalidBinning(_) => "invalid_binning",
            Error::DegenerateDistribution(_) => "degenerate_distribution",
            Error::InvalidCounts(_) => "invalid_counts",
            Error::InvalidThreshold { .. } => "invalid_threshold",
            Error::InvalidParameter { .. } => "invalid_parameter",
            Error::ConstantDistribution => "constant_distribution",
            Error::LengthMismatch { .. } => "length_mismatch",
            Error::NotADistribution(_) => "not_a_distribution",
            Error::UnboundedDivergence(_) => "unbounded_divergence",
            Error::UnknownShape(_) => "unknown_shape",
            Error::InsufficientPool { .. } => "insufficient_pool",
            Error::NoDonor { .. } => "no_donor",
            Error::MissingClass(_) => "missing_class",
            Error::EmptyClass(_) => "empty_class",
            Error::SpecInfeasible(_) => "spec_infeasible",
            Error::Parse { .. } => "parse",
            Error::DuplicateId { .. } => "duplicate_id",
            Error::Config { .. } => "config",
            Error::Io { .. } => "io",
            Error::Json(_) => "json",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
