use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    #[error("fractional orders must satisfy 1 > alpha_1 > ... > alpha_m > 0 with q_1 = 1 and q_j > 0: {0}")]
    InvalidOrders(String),

    #[error("series did not converge after {terms} terms (last block magnitude {last_block:e})")]
    NonConvergence { terms: usize, last_block: f64 },

    #[error("argument magnitude {magnitude} exceeds the evaluator range {limit}")]
    ArgumentRange { magnitude: f64, limit: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("degenerate triangular system: diagonal entry {value:e} at row {row}")]
    DegenerateDiagonal { row: usize, value: f64 },

    #[error("grid too coarse: forward residual {residual:e} exceeds threshold {threshold:e}")]
    GridTooCoarse { residual: f64, threshold: f64 },

    #[error("truncation tolerance {requested:e} unreachable with {modes} modes (achieved bound {achieved:e})")]
    TruncationUnreachable {
        requested: f64,
        achieved: f64,
        modes: usize,
    },

    #[error("operator is not elliptic: {0}")]
    Ellipticity(String),

    #[error("hypothesis flag absent: {0}")]
    HypothesisMissing(&'static str),

    #[error("log-log fit impossible: u = {value:e} <= 0 at t = {t}")]
    NonPositiveSample { t: f64, value: f64 },

    #[error(
        "regularization sweep failed: best residual {residual:e} above tolerance {tolerance:e}"
    )]
    RegularizationFailed { residual: f64, tolerance: f64 },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn arg(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidArgument {
            name,
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
