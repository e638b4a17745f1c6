use thiserror::Error;

/// Failures raised by the simulator.
///
/// Variants split into parameter problems (caller supplied something the
/// model cannot represent) and numerical-regime problems (the request is
/// well formed but the requested quantity does not exist or is too large).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("position {x} outside lattice of size {lx}")]
    OutOfRange { x: i64, lx: usize },

    #[error("singular parameters: {0}")]
    SingularParameter(String),

    #[error("unsupported parameters: {0}")]
    Unsupported(String),

    #[error("lambda = {lambda} lies in the bulk band (cos^2 lambda <= cos^2 phi)")]
    BulkRegime { lambda: f64 },

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("localization fit rejected: {0}")]
    FitQuality(String),

    #[error("dimension {dim} exceeds cap {cap}; use a smaller lattice or a larger support_eps")]
    DimensionCap { dim: usize, cap: usize },
}

impl Error {
    /// True for errors caused by the requested parameter point rather than
    /// malformed input.
    pub fn is_numerical_regime(&self) -> bool {
        !matches!(self, Error::InvalidParameter(_) | Error::OutOfRange { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
