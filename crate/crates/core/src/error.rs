use crate::Cplx;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library can report. Numerical searches never fail silently;
/// they surface one of these with the check that tripped.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("exponent out of range: |Re({exponent})| exceeds {bound}")]
    Range { exponent: Cplx, bound: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("derivative estimate of order {order} did not converge (diff {diff:e}, tolerance {tol:e})")]
    NonConvergence { order: usize, diff: f64, tol: f64 },

    #[error("normalization failed: |phi(0)| = {0} is not 1")]
    Normalization(f64),

    #[error("hypothesis failed: {check}: {detail}")]
    Hypothesis { check: String, detail: String },

    #[error("search failed: {0}")]
    SearchFailure(String),

    #[error("frequency placement violated: {0}")]
    Placement(String),

    #[error("power overflow: |phi({lambda})|^{q} leaves the float range")]
    PowerOverflow { lambda: Cplx, q: u64 },

    #[error("insufficient Taylor length: need {need}, got {got}")]
    TaylorLength { need: usize, got: usize },

    #[error("iteration budget exhausted at n = {n_max} (last residual {last:e})")]
    Exhausted { n_max: u64, last: f64, trace: Vec<(u64, f64)> },

    #[error("io: {0}")]
    Io(String),
}

impl Error {
    pub fn hypothesis(check: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Hypothesis { check: check.into(), detail: detail.into() }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
