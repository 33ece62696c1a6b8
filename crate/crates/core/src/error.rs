use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("unparsable date `{value}` on line {line}")]
    UnparsableDate { value: String, line: usize },
    #[error("unparsable value `{value}` on line {line}")]
    UnparsableValue { value: String, line: usize },
    #[error("dates are not strictly increasing at index {0}")]
    NonMonotoneDates(usize),
    #[error("non-finite value at index {0}")]
    NonFiniteValue(usize),
    #[error("non-positive value {value} at index {index}")]
    NonPositiveValue { index: usize, value: f64 },
    #[error("series too short: need {needed}, have {actual}")]
    SeriesTooShort { needed: usize, actual: usize },
    #[error("series is empty")]
    EmptySeries,
    #[error("date sets do not intersect")]
    EmptyIntersection,
    #[error("split boundary {0} is not strictly inside the series range")]
    BoundaryOutOfRange(chrono::NaiveDate),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("regressor matrix is rank deficient")]
    RankDeficient,
    #[error("too few observations: {n_obs} for {n_params} parameters")]
    TooFewObservations { n_obs: usize, n_params: usize },
    #[error("series is constant")]
    ConstantSeries,
    #[error("residuals are identically zero")]
    DegenerateResiduals,
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("argument {0} outside the admissible domain")]
    OutOfDomain(f64),
    #[error("forcing path covers [0, {available}] but {requested} was requested")]
    PathTooShort { requested: f64, available: f64 },
    #[error("zero denominator at index {0}")]
    ZeroDenominator(usize),

    #[error("invalid time step: {0}")]
    InvalidTimeStep(String),
    #[error("ensemble is empty")]
    EmptyEnsemble,
    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),
    #[error("series did not converge after {iterations} terms (last term norm {last_norm:e})")]
    NotConverged { iterations: usize, last_norm: f64 },
    #[error("invalid budget: {0}")]
    InvalidBudget(usize),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 2 for data or statistical degeneracy, 3 for
    /// numerical non-convergence, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NotConverged { .. } | Error::NumericalFailure(_) => 3,
            Error::Io { .. } | Error::Json(_) | Error::InvalidBudget(_) => 1,
            Error::InvalidParameter(_) | Error::InvalidTimeStep(_) => 1,
            _ => 2,
        }
    }
}
