//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("prior must lie strictly inside (0, 1), got {0}")]
    InvalidPrior(f64),

    #[error("prior vector invalid: {0}")]
    InvalidPriorVector(String),

    #[error("{name} must lie in [0, 1], got {value}")]
    ProbabilityOutOfRange { name: &'static str, value: f64 },

    #[error("{name} = {value} outside required range {range}")]
    ArgumentOutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("series must be nonempty")]
    EmptySeries,

    #[error("series invalid: {0}")]
    InvalidSeries(String),

    #[error("sample must be nonempty")]
    EmptySample,

    #[error("sample invalid: {0}")]
    InvalidSample(String),

    #[error("grid step must be 1/K for integer K >= 2, got K = {0}")]
    InvalidGridStep(u32),

    #[error("starting value {p0} is not a multiple of grid step 1/{denominator}")]
    OffGrid { p0: f64, denominator: u32 },

    #[error("walk not absorbed within {max_steps} steps")]
    NotAbsorbed { max_steps: usize },

    #[error("functional {functional} cannot be computed from generator {generator}")]
    GeneratorMismatch {
        functional: &'static str,
        generator: &'static str,
    },

    #[error("no paths retained for the requested functional")]
    NoPathsRetained,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("dataset empty after filtering")]
    EmptyDataset,

    #[error("every bin fell below the minimum game count")]
    AllBinsOmitted,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}
