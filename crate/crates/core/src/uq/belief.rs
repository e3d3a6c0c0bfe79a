use alloc::vec::Vec;

use crate::error::{check_len, Error, Result};
use crate::linalg::Matrix;

/// Gaussian with a symmetric positive-definite covariance.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianBelief {
    mean: Vec<f64>,
    covariance: Matrix,
    chol: Matrix,
}

impl GaussianBelief {
    /// Validates symmetry (10⁻¹² relative) and positive definiteness.
    pub fn new(mean: Vec<f64>, covariance: Matrix) -> Result<Self> {
        check_len(mean.len(), covariance.rows())?;
        if !covariance.is_square() {
            return Err(Error::DimensionMismatch { expected: covariance.rows(), got: covariance.cols() });
        }
        if !covariance.is_symmetric(1e-12) {
            return Err(Error::NotPositiveDefinite);
        }
        let chol = covariance.cholesky()?;
        Ok(GaussianBelief { mean, covariance, chol })
    }

    /// Symmetrizes `covariance` first; for outputs of congruences and sums that are
    /// symmetric only up to rounding.
    pub fn from_nearly_symmetric(mean: Vec<f64>, covariance: &Matrix) -> Result<Self> {
        Self::new(mean, covariance.symmetrized())
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn covariance(&self) -> &Matrix {
        &self.covariance
    }

    /// Lower Cholesky factor `L`, `P = L Lᵀ`.
    pub fn cholesky(&self) -> &Matrix {
        &self.chol
    }

    /// `mean + L z`.
    pub fn transform_standard(&self, z: &[f64]) -> Result<Vec<f64>> {
        let lz = self.chol.mul_vec(z)?;
        Ok(self.mean.iter().zip(lz).map(|(m, d)| m + d).collect())
    }
}
