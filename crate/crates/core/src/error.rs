use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("polynomials belong to different contexts")]
    ContextMismatch,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("{intrinsic}: constant part {value} is outside the domain")]
    Domain { intrinsic: &'static str, value: f64 },
    #[error("singular configuration: {0}")]
    Singular(&'static str),
    #[error("integration failed at t = {t}: {reason}")]
    Integration { t: f64, reason: &'static str },
    #[error("matrix is not symmetric positive definite")]
    NotPositiveDefinite,
    #[error("eigen-solver did not converge")]
    EigenFailure,
    #[error("differential corrector did not converge after {iterations} iterations (residual {residual:e})")]
    CorrectorFailure { iterations: usize, residual: f64 },
    #[error("construction failed: {0}")]
    Construction(String),
    #[error("rank-deficient design matrix (rank {rank} of {columns}); increase the oversampling factor")]
    RankDeficient { rank: usize, columns: usize },
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),
    #[error("ensemble is empty")]
    EmptyEnsemble,
    #[error("estimator needs at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("{} propagations failed (indices {indices:?})", indices.len())]
    PropagationFailures { indices: Vec<usize> },
    #[error("split leaves a covariance that is not positive definite")]
    SplitIndefinite,
    #[error("reference covariance has zero norm")]
    ZeroReference,
    #[error("degenerate contour (zero area)")]
    DegenerateCurve,
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::InvalidArgument(message.into())
    }

    /// True for failures caused by the numerics (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        !matches!(
            self,
            Error::ContextMismatch
                | Error::DimensionMismatch { .. }
                | Error::InvalidArgument(_)
                | Error::UnsupportedDimension(_)
                | Error::Parse { .. }
        )
    }
}

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
