//! Multivariate normal draws through a Cholesky factor.

use nalgebra::{DMatrix, DVector};

use super::ParameterVector;
use crate::{Error, Result, RngStream};

/// Diagonal jitter added when a covariance fails to factor.
pub const REGULARIZATION: f64 = 1e-10;

/// Lower Cholesky factor of `covariance`, retrying once with
/// `REGULARIZATION * I` added when the matrix is not positive definite.
pub fn regularized_cholesky(covariance: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !covariance.is_square() {
        return Err(Error::NotPositiveDefinite {
            matrix: format!("{covariance:?}"),
        });
    }
    if let Some(chol) = covariance.clone().cholesky() {
        return Ok(chol.l());
    }
    let n = covariance.nrows();
    let jittered = covariance + DMatrix::<f64>::identity(n, n) * REGULARIZATION;
    jittered
        .cholesky()
        .map(|c| c.l())
        .ok_or_else(|| Error::NotPositiveDefinite {
            matrix: format!("{covariance:?}"),
        })
}

/// `mean + L z` with `z` standard normal.
pub fn sample_gaussian_with_factor(
    mean: &[f64],
    factor: &DMatrix<f64>,
    rng: &mut RngStream,
) -> Vec<f64> {
    let z = DVector::from_iterator(mean.len(), (0..mean.len()).map(|_| rng.standard_normal()));
    let step = factor * z;
    mean.iter().zip(step.iter()).map(|(m, s)| m + s).collect()
}

/// One draw from `Normal(mean, covariance)`.
pub fn sample_gaussian(
    mean: &ParameterVector,
    covariance: &DMatrix<f64>,
    rng: &mut RngStream,
) -> Result<ParameterVector> {
    if covariance.nrows() != mean.dimension() {
        return Err(Error::DimensionMismatch {
            expected: mean.dimension(),
            actual: covariance.nrows(),
        });
    }
    let factor = regularized_cholesky(covariance)?;
    ParameterVector::new(sample_gaussian_with_factor(mean, &factor, rng))
}
