use thiserror::Error;

/// Errors raised by the Dunkl workbench.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("division by the root form <{root:?}, x> left a nonzero remainder")]
    NonDivisible { root: Vec<f64> },

    #[error("loss of orthogonality {deviation:.3e} in degree {degree}")]
    OrthogonalityLoss { degree: usize, deviation: f64 },

    #[error("kernel truncation bound {bound:.3e} exceeds tolerance {tolerance:.3e}")]
    TruncationBound { bound: f64, tolerance: f64 },

    #[error("kernel argument {0} is outside the supported evaluation domain")]
    KernelDomain(String),

    #[error("non-finite integrand value at node {node:?}")]
    NonFinite { node: Vec<f64> },

    #[error("multi-index {index:?} exceeds the basis cutoff {cutoff}")]
    BeyondCutoff { index: Vec<u32>, cutoff: usize },

    #[error("eigen residual {residual:.3e} above tolerance {tolerance:.3e} for index {index:?}")]
    EigenResidual {
        index: Vec<u32>,
        residual: f64,
        tolerance: f64,
    },

    #[error("time {0} is within 1e-3 of a multiple of pi")]
    SingularTime(f64),

    #[error("quadrature error estimate {estimate:.3e} above {tolerance:.3e}")]
    QuadratureAccuracy { estimate: f64, tolerance: f64 },

    #[error("degenerate regression grid: {0}")]
    DegenerateGrid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
