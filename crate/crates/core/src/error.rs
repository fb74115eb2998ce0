use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error(
        "insufficient padding on the {side} side: have {have:.6}, need at least {required:.6} beyond the support"
    )]
    InsufficientPadding {
        side: &'static str,
        have: f64,
        required: f64,
    },

    #[error("dimension mismatch: expected a {expected} profile")]
    DimensionMismatch { expected: &'static str },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error(
        "quadrature did not converge: achieved error {achieved:.3e}, requested {requested:.3e}"
    )]
    QuadratureNonConvergence { achieved: f64, requested: f64 },

    #[error("eigenvalue iteration did not converge at index {index} after {iterations} sweeps")]
    EigenNonConvergence { index: usize, iterations: usize },

    #[error("operator has {interior} interior points, above the dense-solver cap {cap}; coarsen the grid or raise the cap")]
    SolverCapExceeded { interior: usize, cap: usize },

    #[error("spectral clusters unresolved: {0}")]
    ClusterSeparation(String),

    #[error("sector `none` admits no zero modes")]
    NoSector,

    #[error("config: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn param(field: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.to_string(),
            reason: reason.into(),
        }
    }

    /// True for failures of a numerical routine rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::QuadratureNonConvergence { .. }
                | Error::EigenNonConvergence { .. }
                | Error::ClusterSeparation(_)
        )
    }
}
