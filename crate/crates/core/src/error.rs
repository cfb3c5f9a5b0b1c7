use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{what}: size {got} exceeds the guard {limit}")]
    SizeGuard {
        what: &'static str,
        limit: usize,
        got: usize,
    },

    #[error("cumulant of order {0} is missing from the table")]
    MissingCumulant(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("word expansion at order {n} violates a coefficient relation: {detail}")]
    RelationViolated { n: usize, detail: String },

    #[error("non-finite moment of order {order} at t = {t}")]
    NonFinite { t: f64, order: usize },

    #[error("step control failed near t = {t}: step {step:e} is below the minimum")]
    ToleranceNotReached { t: f64, step: f64 },

    #[error("{what}: residual {value:e} exceeds {limit:e}")]
    Residual {
        what: &'static str,
        value: f64,
        limit: f64,
    },

    #[error("derivative of order {0} left a non-polynomial remainder")]
    NonPolynomialRemainder(usize),

    #[error("argument {0} lies on the branch cut")]
    BranchCut(String),

    #[error("power series diverges at |z| = {radius}: tail term {tail:e}")]
    SeriesDivergence { radius: f64, tail: f64 },

    #[error("series order mismatch: expected {expected}, got {got}")]
    OrderMismatch { expected: usize, got: usize },

    #[error("time grid unsuitable: {0}")]
    InvalidGrid(String),

    #[error("unitarity lost: |U*U - I|_max = {0:e}")]
    Unitarity(f64),

    #[error("density matrix has zero trace")]
    ZeroTrace,

    #[error("projection rank {rank} does not divide evenly into N = {n}")]
    RankMismatch { rank: String, n: usize },

    #[error("eigendecomposition failed")]
    Eigen,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
