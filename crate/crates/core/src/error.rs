use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the solver reports. Scalar payloads are widened to `f64`
/// so the error type does not depend on the working precision.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("density must be positive, found {value:e} at cell {cell}")]
    NonPositiveDensity { value: f64, cell: usize },
    #[error("concentration must be nonnegative, found {value:e} at cell {cell}")]
    NegativeConcentration { value: f64, cell: usize },
    #[error("argument must be nonnegative, found {0:e}")]
    NegativeArgument(f64),
    #[error("iterated stencil Laplacian of order {order} exceeds the stencil limit of 2")]
    OrderTooHigh { order: usize },
    #[error("Poisson source has mean {mean:e}, tolerance {tolerance:e}")]
    NonZeroMeanSource { mean: f64, tolerance: f64 },
    #[error("initial data carries net charge {net:e} (tolerance {tolerance:e}); enable enforce_neutrality to subtract it")]
    NonNeutralCharge { net: f64, tolerance: f64 },
    #[error("time step {dt:e} exceeds the stability budget {limit:e}")]
    StabilityLimit { dt: f64, limit: f64 },
    #[error("step rejected at t = {t:e}, cell {cell}: {reason}")]
    StepRejected { t: f64, cell: usize, reason: String },
    #[error("mismatched series: {0}")]
    MismatchedSeries(String),
    #[error("inconsistent manufactured solution: {0}")]
    InconsistentManufacture(String),
    #[error("need at least {needed} resolutions, got {got}")]
    InsufficientResolutions { needed: usize, got: usize },
    #[error("no convergence after {iterations} iterations (last update {update:e})")]
    NoConvergence { iterations: usize, update: f64 },
    #[error("bad snapshot: {0}")]
    BadSnapshot(String),
    #[error("bad profile expression {expr:?}: {reason}")]
    BadProfile { expr: String, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short machine-readable category used by the command-line driver.
    pub fn category(&self) -> &'static str {
        match self {
            Error::InvalidGrid(_) | Error::InvalidParameter(_) | Error::BadProfile { .. } => {
                "validation"
            }
            Error::GridMismatch | Error::OrderTooHigh { .. } => "usage",
            Error::NonPositiveDensity { .. } | Error::NegativeConcentration { .. } => "positivity",
            Error::NegativeArgument(_) => "domain",
            Error::NonZeroMeanSource { .. } | Error::NonNeutralCharge { .. } => "neutrality",
            Error::StabilityLimit { .. } | Error::StepRejected { .. } => "step",
            Error::MismatchedSeries(_)
            | Error::InconsistentManufacture(_)
            | Error::InsufficientResolutions { .. }
            | Error::NoConvergence { .. } => "verification",
            Error::BadSnapshot(_) | Error::Io(_) => "io",
        }
    }
}
