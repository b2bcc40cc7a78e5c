use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// The evaluation point lies on the branch disk of a complex source point.
    #[error("point lies on the branch disk (w = {w_re} + {w_im}i)")]
    OnBranchCut { w_re: f64, w_im: f64 },

    #[error("singular evaluation: {0}")]
    Singular(&'static str),

    #[error("emission point |x_e| = {norm} is not inside the sphere of radius {radius}")]
    OutsideSphere { norm: f64, radius: f64 },

    /// The complex radius is outside the analyticity domain for the given points.
    #[error("complex radius {re} + {im}i outside the analytic domain: {reason}")]
    DomainViolation { re: f64, im: f64, reason: &'static str },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no convergence after {iterations} refinements (last change {last_change:e})")]
    NoConvergence { iterations: usize, last_change: f64 },

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
