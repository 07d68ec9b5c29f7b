//! Adaptive Metropolis baseline.
//!
//! Gaussian random-walk Metropolis with proposal covariance
//! `scale^2 * cov`. For the first `adaptation_start` iterations `cov` is the
//! configured initial covariance; afterwards it is the empirical covariance
//! of the states `ceil(k/2)..=k`, recomputed from scratch at every step.

use nalgebra::DMatrix;

use super::gaussian::{regularized_cholesky, sample_gaussian_with_factor};
use super::{
    check_start, evaluate, mh_accept, ChainHistory, ChainState, ParameterVector, TargetDensity,
};
use crate::{default_jump_scale, Error, Result, RngStream};

#[derive(Debug, Clone, PartialEq)]
pub struct AmcConfig {
    pub scale: f64,
    pub initial_covariance: DMatrix<f64>,
    /// Iterations run with the initial covariance before adaptation.
    pub adaptation_start: usize,
    pub iterations: usize,
    pub seed: u64,
}

impl AmcConfig {
    /// Defaults: `scale = 2.38/sqrt(2d)`, identity covariance, 250
    /// non-adaptive iterations.
    pub fn new(dimension: usize, iterations: usize, seed: u64) -> Self {
        Self {
            scale: default_jump_scale(dimension),
            initial_covariance: DMatrix::identity(dimension, dimension),
            adaptation_start: 250,
            iterations,
            seed,
        }
    }

    pub fn validate(&self, dimension: usize) -> Result<()> {
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "scale must be positive, got {}",
                self.scale
            )));
        }
        if self.adaptation_start == 0 {
            return Err(Error::InvalidConfig(
                "adaptation_start must be positive".into(),
            ));
        }
        let cov = &self.initial_covariance;
        if cov.nrows() != dimension || cov.ncols() != dimension {
            return Err(Error::DimensionMismatch {
                expected: dimension,
                actual: cov.nrows(),
            });
        }
        if (cov - cov.transpose()).amax() > 1e-12 {
            return Err(Error::InvalidConfig(
                "initial covariance is not symmetric".into(),
            ));
        }
        if cov.clone().cholesky().is_none() {
            return Err(Error::NotPositiveDefinite {
                matrix: format!("{cov:?}"),
            });
        }
        Ok(())
    }
}

/// Sample covariance (`n - 1` denominator) of states `start..=end`.
/// A single-state window has zero covariance.
pub fn window_covariance(history: &ChainHistory, start: usize, end: usize) -> DMatrix<f64> {
    let d = history.dimension();
    let window = &history.states()[start..=end];
    let n = window.len();
    let mut cov = DMatrix::zeros(d, d);
    if n < 2 {
        return cov;
    }
    let mut mean = vec![0.0; d];
    for s in window {
        for (m, x) in mean.iter_mut().zip(s.theta.iter()) {
            *m += x;
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }
    let mut centered = vec![0.0; d];
    for s in window {
        for ((c, x), m) in centered.iter_mut().zip(s.theta.iter()).zip(&mean) {
            *c = x - m;
        }
        for i in 0..d {
            for j in 0..d {
                cov[(i, j)] += centered[i] * centered[j];
            }
        }
    }
    cov / (n as f64 - 1.0)
}

/// Runs `cfg.iterations` adaptive Metropolis steps from `theta0`.
pub fn run_amc<T: TargetDensity + ?Sized>(
    target: &T,
    theta0: ParameterVector,
    cfg: &AmcConfig,
) -> Result<ChainHistory> {
    cfg.validate(target.dimension())?;
    let mut history = check_start(target, theta0)?;
    let mut rng = RngStream::new(cfg.seed);
    let scale2 = cfg.scale * cfg.scale;
    let fixed_factor = regularized_cholesky(&(&cfg.initial_covariance * scale2))?;

    for _ in 0..cfg.iterations {
        let k = history.len() - 1;
        let adapted;
        let factor = if k < cfg.adaptation_start {
            &fixed_factor
        } else {
            let cov = window_covariance(&history, k.div_ceil(2), k) * scale2;
            adapted = regularized_cholesky(&cov)?;
            &adapted
        };
        let current = history.last();
        let proposal = sample_gaussian_with_factor(&current.theta, factor, &mut rng);
        let log_proposed = evaluate(target, &proposal);
        let finite = proposal.iter().all(|v| v.is_finite());
        if mh_accept(current.log_density, log_proposed, &mut rng) && finite {
            let theta = ParameterVector::new(proposal)?;
            history.push(
                ChainState {
                    theta,
                    log_density: log_proposed,
                },
                true,
            );
        } else {
            let copy = current.clone();
            history.push(copy, false);
        }
    }
    Ok(history)
}
