use thiserror::Error;

use crate::quadrature::QuadResult;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("underflow: {0}")]
    Underflow(String),

    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),

    #[error(
        "normalization series diverges: |alpha|^2 = {abs_alpha_sq} is not below the radius of convergence {radius}"
    )]
    Divergence { abs_alpha_sq: f64, radius: f64 },

    #[error(
        "quadrature did not converge: best ln I = {}, relative error bound {:e} after {} evaluations",
        best.log_value, best.rel_error_estimate, best.evaluations
    )]
    NonConvergence { best: QuadResult },

    #[error("target tolerance {0:e} is infeasible (must lie in [1e-13, 1e-3])")]
    ToleranceInfeasible(f64),

    #[error("family mismatch: {0}")]
    FamilyMismatch(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::ParameterOutOfRange(msg.into())
    }
}
