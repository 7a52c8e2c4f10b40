//! Error type shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while building problems, solving them, or
/// certifying their solutions.
#[derive(Debug, Error)]
pub enum Error {
    /// A vector had the wrong length for its space.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A time fell outside the window a curve is defined on.
    #[error("time {t} outside window [{start}, {end}]")]
    OutOfWindow { t: f64, start: f64, end: f64 },

    /// A grid failed validation (non-finite endpoints, wrong ordering, too few nodes).
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// A regularization parameter left its admissible range.
    #[error("lambda {lambda} outside admissible range (0, {max}]")]
    LambdaOutOfRange { lambda: f64, max: f64 },

    /// A scalar parameter was out of range for the operation.
    #[error("parameter out of range: {0}")]
    ParamRange(String),

    /// An operation needed continuity-control data the family does not carry.
    #[error("operator family `{0}` carries no continuity-control data")]
    MissingControl(String),

    /// A half-line solve was requested without an initial value.
    #[error("problem carries no initial value but the half-line solver needs one")]
    MissingInitial,

    /// A structural hypothesis of the method was violated.
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    /// The measured iteration contraction exceeded its a-priori bound.
    #[error("contraction estimate {measured} exceeds bound {bound}; the operator oracle is suspect")]
    ContractionViolated { measured: f64, bound: f64 },

    /// A per-node implicit solve failed to reach tolerance.
    #[error("implicit node solve stalled at node {node} with defect {defect}")]
    LocalIterationStalled { node: usize, defect: f64 },

    /// An iteration hit its cap before reaching tolerance.
    #[error("iteration failed to converge within {max_iter} steps (last change {last_change})")]
    IterationLimit { max_iter: usize, last_change: f64 },

    /// The window is too short for the requested kernel scale.
    #[error("window of length {got} too short: need at least {needed} for the requested tail tolerance")]
    WindowTooShort { needed: f64, got: f64 },

    /// A quadrature refinement failed to settle within its budget.
    #[error("quadrature failed to converge: {0}")]
    QuadratureNonConvergence(String),

    /// Two inputs that must describe the same problem disagreed.
    #[error("mismatched problems: {0}")]
    MismatchedProblems(String),

    /// A scenario or CLI configuration could not be parsed or validated.
    #[error("configuration error: {0}")]
    Config(String),

    /// Filesystem trouble while reading configs or writing reports.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// JSON trouble while reading configs or writing certificates.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    /// CSV trouble while writing reports.
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}
