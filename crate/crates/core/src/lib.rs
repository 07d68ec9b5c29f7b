//! Single-chain differential-evolution Monte-Carlo (DEMC) and an adaptive
//! Metropolis (AMC) baseline, together with the models and diagnostics used
//! to compare them.
//!
//! The crate is organised around a single contract, [`TargetDensity`]: both
//! samplers consume it, and the [`targets`] module provides the correlated
//! bivariate normal and the Lotka-Volterra posterior as implementations.
//!
//! ```
//! use demc_core::{run_demc, DemcConfig, ParameterVector};
//! use demc_core::targets::MvnTarget;
//!
//! let target = MvnTarget::new(1.0, 1.0, 0.99).unwrap();
//! let cfg = DemcConfig::new(2, 2_000, 7);
//! let theta0 = ParameterVector::new(vec![0.1, -0.2]).unwrap();
//! let history = run_demc(&target, theta0, &cfg).unwrap();
//! assert_eq!(history.len(), 2_001);
//! ```

// `!(x > 0.0)` is used deliberately so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod ode;
pub mod rng;
pub mod sampler;
pub mod targets;

pub use error::{Error, Result};
pub use rng::{derive_seed, RngStream};
pub use sampler::{
    amc::{run_amc, AmcConfig},
    demc::{demc_propose, differential_step, run_demc, DemcConfig},
    gaussian::{regularized_cholesky, sample_gaussian, sample_gaussian_with_factor},
    mh_accept, mh_accept_with_threshold, ChainHistory, ChainState, ParameterVector, TargetDensity,
};

/// Version of this crate, recorded in experiment manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Default jump scale `2.38 / sqrt(2 d)` shared by the DEMC and AMC kernels.
pub fn default_jump_scale(dimension: usize) -> f64 {
    2.38 / (2.0 * dimension as f64).sqrt()
}
