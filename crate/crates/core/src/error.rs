use thiserror::Error;

/// Errors raised by the simulator.
///
/// Precondition failures that callers routinely probe on purpose (a
/// non-commuting `G`, an inadmissible spectrum) are reported through the
/// returned report types instead of through this enum.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows} rows, {cols} columns)")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not self-adjoint (entry ({row}, {col}) differs from the conjugate of its transpose)")]
    NotSelfAdjoint { row: usize, col: usize },

    #[error("index {index} out of range {lo}..={hi}")]
    OutOfRange { index: i64, lo: i64, hi: i64 },

    #[error("history needs at least {needed} slices, has {found}")]
    HistoryTooShort { needed: usize, found: usize },

    #[error("history exceeds the slice cap of {cap}")]
    HistoryCap { cap: usize },

    #[error("closed form is singular: eigenvalue {eigenvalue} sits on the band edge |lε| = 2")]
    SingularClosedForm { eigenvalue: f64 },

    #[error("inadmissible eigenvalue lε = {eigenvalue} (|lε| > 2)")]
    Inadmissible { eigenvalue: f64 },

    #[error("t = {t} lies outside the guarded region [{lo}, {hi}] of the sample window")]
    EdgeGuard { t: f64, lo: f64, hi: f64 },

    #[error("basis is empty")]
    EmptyBasis,

    #[error("basis vectors {0} and {1} are linearly dependent")]
    DependentBasis(usize, usize),

    #[error("trial family is empty")]
    EmptyFamily,

    #[error("lattice state is not normalized (norm² = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("lattice state violates the boundary guard at site {site} (|amplitude| = {amplitude})")]
    BoundaryGuard { site: i64, amplitude: f64 },

    #[error("factor {0} is not a solution history")]
    NotASolution(usize),

    #[error("tensor would hold {entries} entries, above the cap of {cap}")]
    TensorCap { entries: usize, cap: usize },

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
