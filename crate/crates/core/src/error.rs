use thiserror::Error;

/// Errors raised by the evaluators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("order N={0} is not supported for this evaluation")]
    UnsupportedOrder(usize),

    #[error("integral of |p| diverges for odd N={0}")]
    NotAbsolutelyConvergent(usize),

    #[error("ordering violation: {0}")]
    Ordering(String),

    #[error("start point on the wrong side of the level: {0}")]
    Side(String),

    #[error("root index {l}: Re(theta_l * xi) must be negative")]
    WrongHalfPlane { l: usize },

    #[error("quadrature did not converge (error estimate {estimate:e})")]
    Quadrature { estimate: f64 },

    #[error("transform returned a non-finite value at lambda = {re} + {im}i")]
    NonFinite { re: f64, im: f64 },

    #[error("time horizon K*dt = {covered} too short, need {needed}")]
    HorizonNotCovered { covered: f64, needed: f64 },

    #[error("grid too narrow: truncated kernel mass error {0:e}")]
    GridTooNarrow(f64),

    #[error("path enumeration of {0} paths exceeds budget")]
    EnumerationBudget(u64),

    #[error("value out of range: {0}")]
    OutOfRange(String),
}

pub type Result<T> = std::result::Result<T, Error>;
