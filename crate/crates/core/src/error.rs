//! Error type shared by every module.

/// Failure modes of the discretization, solver and diagnostics.
#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum DfError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("kernel denominator {value:e} below threshold {threshold:e}")]
    DegenerateKernel { value: f64, threshold: f64 },
    #[error("{what} is not Hermitian (deviation {deviation:e})")]
    NonHermitian { what: String, deviation: f64 },
    #[error("eigensolver residual {residual:e} on fiber {fiber}")]
    EigenFailure { fiber: usize, residual: f64 },
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("occupation {value} on fiber {fiber} outside [0, 1]")]
    OccupationOutOfRange { fiber: usize, value: f64 },
    #[error("trace {trace} exceeds q = {q}")]
    TraceExceedsQ { trace: f64, q: f64 },
    #[error("retraction stopped contracting at iteration {iteration} (ratio {ratio})")]
    NonContraction { iteration: usize, ratio: f64 },
    #[error("retraction hit max_iter {max_iter} with step {step:e}")]
    RetractionMaxIter { max_iter: usize, step: f64 },
    #[error("only {available} positive states available, {required} required")]
    InsufficientStates { available: usize, required: usize },
    #[error("SCF not converged after {iterations} iterations (residual {residual:e}, energy change {energy_change:e})")]
    ScfNotConverged { iterations: usize, residual: f64, energy_change: f64 },
    #[error("no descent direction at SCF iteration {iteration} (slope {slope:e})")]
    NoDescent { iteration: usize, slope: f64 },
    #[error("assumption failed: {0}")]
    AssumptionFailed(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("property check failed: {0}")]
    PropertyFailed(String),
    #[error("band tracking ambiguous at path point {0}")]
    AmbiguousTracking(usize),
    #[error("i/o: {0}")]
    Io(String),
    #[error("checkpoint not found: {0}")]
    MissingCheckpoint(String),
    #[error("validation: {0}")]
    Validation(String),
}

pub type Result<T> = std::result::Result<T, DfError>;

impl From<std::io::Error> for DfError {
    fn from(e: std::io::Error) -> Self {
        DfError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for DfError {
    fn from(e: serde_json::Error) -> Self {
        DfError::Validation(e.to_string())
    }
}
