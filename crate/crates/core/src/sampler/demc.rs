//! Single-chain differential-evolution Monte-Carlo.
//!
//! Each proposal is the current state plus a scaled difference of two past
//! states of the same chain, plus small uniform noise:
//!
//! ```text
//! proposal = current + gamma * (history[u] - history[v]) + eps,   eps_i ~ U(-delta, delta)
//! ```
//!
//! `u` and `v` are drawn independently and uniformly from `0..=k-1`, where
//! `k` is the index of the current state. They may coincide, in which case
//! the step is pure noise. This is always the case for the first two
//! iterations, whose pool is `{0}`.
//!
//! The kernel is symmetric: swapping `u` and `v` and negating the noise maps
//! a proposal to its mirror image about the current state, so the plain
//! Metropolis ratio applies. The target is evaluated once per iteration.

use super::{
    check_start, evaluate, mh_accept, ChainHistory, ChainState, ParameterVector, TargetDensity,
};
use crate::{default_jump_scale, Error, Result, RngStream};

#[derive(Debug, Clone, PartialEq)]
pub struct DemcConfig {
    /// Jump scale applied to the difference vector.
    pub gamma: f64,
    /// Half-width of the componentwise uniform noise.
    pub delta: f64,
    pub iterations: usize,
    pub seed: u64,
}

impl DemcConfig {
    /// Defaults for a `dimension`-dimensional target: `gamma = 2.38/sqrt(2d)`,
    /// `delta = 0.001`.
    pub fn new(dimension: usize, iterations: usize, seed: u64) -> Self {
        Self {
            gamma: default_jump_scale(dimension),
            delta: 0.001,
            iterations,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "gamma must be positive, got {}",
                self.gamma
            )));
        }
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "delta must be non-negative, got {}",
                self.delta
            )));
        }
        Ok(())
    }
}

/// `current + gamma * (theta_u - theta_v) + noise`, componentwise.
pub fn differential_step(
    current: &[f64],
    theta_u: &[f64],
    theta_v: &[f64],
    gamma: f64,
    noise: &[f64],
) -> Vec<f64> {
    current
        .iter()
        .zip(theta_u)
        .zip(theta_v)
        .zip(noise)
        .map(|(((c, a), b), e)| c + gamma * (a - b) + e)
        .collect()
}

/// Draws a DEMC proposal from the end of `history`.
///
/// Draw order is `u`, `v`, then one noise term per coordinate.
pub fn demc_propose(history: &ChainHistory, cfg: &DemcConfig, rng: &mut RngStream) -> Vec<f64> {
    let k = history.len() - 1;
    let pool_max = k.saturating_sub(1);
    let u = rng.index_inclusive(pool_max);
    let v = rng.index_inclusive(pool_max);
    let current = &history.last().theta;
    let noise: Vec<f64> = (0..current.dimension())
        .map(|_| rng.uniform_range(-cfg.delta, cfg.delta))
        .collect();
    let states = history.states();
    differential_step(
        current,
        &states[u].theta,
        &states[v].theta,
        cfg.gamma,
        &noise,
    )
}

/// Runs `cfg.iterations` DEMC steps from `theta0`.
///
/// The returned history has `iterations + 1` states. The target is called
/// exactly `iterations + 1` times.
pub fn run_demc<T: TargetDensity + ?Sized>(
    target: &T,
    theta0: ParameterVector,
    cfg: &DemcConfig,
) -> Result<ChainHistory> {
    cfg.validate()?;
    let mut history = check_start(target, theta0)?;
    let mut rng = RngStream::new(cfg.seed);

    for _ in 0..cfg.iterations {
        let proposal = demc_propose(&history, cfg, &mut rng);
        let log_proposed = evaluate(target, &proposal);
        let current = history.last();
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
