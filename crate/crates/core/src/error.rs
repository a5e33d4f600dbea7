use thiserror::Error;

/// Errors raised by model construction, Riemann solvers, schemes and verification.
///
/// Numeric payloads are stored as `f64` regardless of the scalar type in use
/// so that errors are cheap to report and serialize.
#[derive(Debug, Clone, PartialEq, Error, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", content = "detail", rename_all = "snake_case")]
pub enum Error {
    #[error("state {state:?} lies outside the model domain")]
    OutOfDomain { state: Vec<f64> },

    #[error("model is not strictly hyperbolic at {state:?}: {reason}")]
    NonHyperbolic { state: Vec<f64>, reason: String },

    #[error("model has no entropy pair")]
    MissingEntropyPair,

    #[error("characteristic speed {speed} outside [-{bound}, {bound}]")]
    SpeedBoundViolated { speed: f64, bound: f64 },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("shock-curve continuation failed at s = {s}: {reason}")]
    ContinuationFailure { s: f64, reason: String },

    #[error("family {family} is not genuinely nonlinear")]
    NotGenuinelyNonlinear { family: usize },

    #[error("family {family} is neither genuinely nonlinear nor linearly degenerate")]
    NonClassifiedField { family: usize },

    #[error("Newton iteration diverged after {iterations} iterations (residual {residual:e})")]
    NewtonDivergence { iterations: usize, residual: f64 },

    #[error("Riemann data of size {size} exceeds the small-data radius {radius}")]
    DataTooLarge { size: f64, radius: f64 },

    #[error("right state is not on the family-{family} shock curve (residual {residual:e})")]
    NotOnShockCurve { family: usize, residual: f64 },

    #[error("Rankine-Hugoniot condition violated (residual {residual:e})")]
    RhViolated { residual: f64 },

    #[error("characteristic speed {speed} outside the required range [{lo}, {hi}]")]
    SpeedRangeViolation { speed: f64, lo: f64, hi: f64 },

    #[error("non-finite state in cell {cell} at step {step}")]
    NonfiniteState { step: usize, cell: usize },

    #[error("Riemann solve failed: {0}")]
    RiemannFailure(String),

    #[error("front count {count} exceeds the cap {cap}")]
    FrontExplosion { count: usize, cap: usize },

    #[error("CFL violation: {0}")]
    CflViolation(String),

    #[error("subcharacteristic condition violated: a^2 = {a2} < max speed^2 = {needed}")]
    SubcharacteristicViolation { a2: f64, needed: f64 },

    #[error("Newton failure in cell {cell} (residual {residual:e})")]
    NewtonFailure { cell: usize, residual: f64 },

    #[error("restart interval {step} is not shorter than the blow-up time {t_blowup}")]
    BlowupBeforeRestart { step: f64, t_blowup: f64 },

    #[error("test-function scale {scale} is resolved by fewer than 4 cells of size {dx}")]
    QuadratureUnderResolved { scale: f64, dx: f64 },

    #[error("oracle unavailable: {0}")]
    OracleUnavailable(String),

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
