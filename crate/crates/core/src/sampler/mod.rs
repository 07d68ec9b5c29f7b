//! Samplers over an abstract log-density.

pub mod amc;
pub mod demc;
pub mod gaussian;

use std::ops::Deref;

use crate::{Error, Result, RngStream};

/// A point in the sampler's parameter space. Entries are always finite.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterVector(Vec<f64>);

impl ParameterVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("empty parameter vector".into()));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite entry {bad}")));
        }
        Ok(Self(values))
    }

    pub fn dimension(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for ParameterVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// An accepted state together with its cached log-density.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainState {
    pub theta: ParameterVector,
    pub log_density: f64,
}

/// Ordered record of chain states, index 0 being the initial point.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainHistory {
    states: Vec<ChainState>,
    accepted: usize,
}

impl ChainHistory {
    /// Starts a history from a state with positive density.
    pub fn start(initial: ChainState) -> Result<Self> {
        if !(initial.log_density > f64::NEG_INFINITY) {
            return Err(Error::ZeroDensityStart {
                log_density: initial.log_density,
            });
        }
        Ok(Self {
            states: vec![initial],
            accepted: 0,
        })
    }

    /// Rebuilds a history from stored states (e.g. parsed from disk).
    pub fn from_states(states: Vec<ChainState>) -> Result<Self> {
        let first = states
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty chain".into()))?;
        let d = first.theta.dimension();
        if let Some(s) = states.iter().find(|s| s.theta.dimension() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: s.theta.dimension(),
            });
        }
        let accepted = states.windows(2).filter(|w| w[0] != w[1]).count();
        Ok(Self { states, accepted })
    }

    pub(crate) fn push(&mut self, state: ChainState, accepted: bool) {
        if accepted {
            self.accepted += 1;
        }
        self.states.push(state);
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.states[0].theta.dimension()
    }

    pub fn states(&self) -> &[ChainState] {
        &self.states
    }

    pub fn last(&self) -> &ChainState {
        self.states.last().expect("history is never empty")
    }

    pub fn get(&self, index: usize) -> Option<&ChainState> {
        self.states.get(index)
    }

    /// Number of accepted proposals.
    pub fn accepted(&self) -> usize {
        self.accepted
    }

    pub fn acceptance_rate(&self) -> f64 {
        let steps = self.states.len() - 1;
        if steps == 0 {
            0.0
        } else {
            self.accepted as f64 / steps as f64
        }
    }

    /// Values of parameter `dim` across all states.
    pub fn component(&self, dim: usize) -> Vec<f64> {
        self.states.iter().map(|s| s.theta[dim]).collect()
    }

    pub fn log_densities(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.log_density).collect()
    }

    /// Sub-history made of the states at the given indices, in order.
    pub fn select(&self, indices: &[usize]) -> ChainHistory {
        ChainHistory::from_states(indices.iter().map(|&i| self.states[i].clone()).collect())
            .expect("selection from a valid history")
    }
}

/// Log-density of the distribution being sampled. Implementations must be
/// deterministic and safe to call from concurrent chains.
pub trait TargetDensity: Sync {
    fn dimension(&self) -> usize;

    /// Log-density at `theta`, `-inf` outside the support.
    fn log_density(&self, theta: &[f64]) -> f64;
}

impl<T: TargetDensity + ?Sized> TargetDensity for &T {
    fn dimension(&self) -> usize {
        (**self).dimension()
    }

    fn log_density(&self, theta: &[f64]) -> f64 {
        (**self).log_density(theta)
    }
}

/// Metropolis acceptance for a symmetric kernel, in log space.
///
/// Draws `q ~ U(0, 1)` and accepts iff `log_proposed - log_current > ln q`.
/// A zero-density (or NaN) proposal is always rejected; `q` is drawn
/// regardless so the stream position does not depend on the outcome.
pub fn mh_accept(log_current: f64, log_proposed: f64, rng: &mut RngStream) -> bool {
    let q = rng.uniform();
    mh_accept_with_threshold(log_current, log_proposed, q)
}

/// [`mh_accept`] with an explicit uniform threshold `q` in (0, 1).
pub fn mh_accept_with_threshold(log_current: f64, log_proposed: f64, q: f64) -> bool {
    if log_proposed.is_nan() || log_proposed == f64::NEG_INFINITY {
        return false;
    }
    log_proposed - log_current > q.ln()
}

/// Evaluates a target and folds NaN into `-inf`.
pub(crate) fn evaluate<T: TargetDensity + ?Sized>(target: &T, theta: &[f64]) -> f64 {
    let lp = target.log_density(theta);
    if lp.is_nan() {
        f64::NEG_INFINITY
    } else {
        lp
    }
}

pub(crate) fn check_start<T: TargetDensity + ?Sized>(
    target: &T,
    theta0: ParameterVector,
) -> Result<ChainHistory> {
    if theta0.dimension() != target.dimension() {
        return Err(Error::DimensionMismatch {
            expected: target.dimension(),
            actual: theta0.dimension(),
        });
    }
    let log_density = evaluate(target, &theta0);
    ChainHistory::start(ChainState {
        theta: theta0,
        log_density,
    })
}
