use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("unsupported dimension n = {0}; only n = 1 and n = 2 are implemented")]
    UnsupportedDimension(usize),

    #[error("point is not inside the open unit ball (|z| = {0})")]
    OutsideBall(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A theorem hypothesis does not hold for the requested parameters.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("no quadrature node landed in {0}")]
    NodeStarvation(String),

    #[error("empty radial mesh")]
    EmptyMesh,

    #[error("lattice invariant violated: {0}")]
    LatticeInvariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
