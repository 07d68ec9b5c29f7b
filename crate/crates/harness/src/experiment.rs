//! Builds targets from a config and runs the chains.

use std::time::Instant;

use demc_core::ode::TimeSeries;
use demc_core::targets::{generate_synthetic_data, LvPosterior, MvnTarget};
use demc_core::{
    derive_seed, run_amc, run_demc, ChainHistory, ParameterVector, RngStream, TargetDensity,
};

use crate::config::{Algorithm, ExperimentConfig, TargetKind};
use crate::error::{HarnessError, Result};
use crate::io;

/// Seed purposes fed to [`derive_seed`].
pub mod purpose {
    pub const INITIAL_POINT: u64 = 1;
    pub const SAMPLER: u64 = 2;
    pub const OBSERVATION_NOISE: u64 = 3;
    pub const REFERENCE_DRAWS: u64 = 4;
}

/// Attempts at drawing a starting point with positive density.
pub const MAX_INITIAL_DRAWS: usize = 100;

#[derive(Debug, Clone)]
pub enum Model {
    Mvn(MvnTarget),
    LotkaVolterra(LvPosterior),
}

impl Model {
    pub fn target(&self) -> &dyn TargetDensity {
        match self {
            Model::Mvn(t) => t,
            Model::LotkaVolterra(t) => t,
        }
    }

    /// Draws from the initialization distribution: standard normal for the
    /// Gaussian target, the uniform prior for the ODE posterior.
    fn draw_initial(&self, rng: &mut RngStream) -> Vec<f64> {
        match self {
            Model::Mvn(_) => (0..2).map(|_| rng.standard_normal()).collect(),
            Model::LotkaVolterra(p) => {
                let (lo, hi) = p.prior_bounds();
                (0..4).map(|_| rng.uniform_range(lo, hi)).collect()
            }
        }
    }
}

/// Simulates the observations described by the `[lotka_volterra]` section.
pub fn simulate_observations(cfg: &ExperimentConfig) -> Result<TimeSeries> {
    let lv = &cfg.lotka_volterra;
    let mut rng = RngStream::new(derive_seed(cfg.master_seed, 0, purpose::OBSERVATION_NOISE));
    generate_synthetic_data(
        &lv.params(),
        lv.initial_state(),
        &lv.integrator(),
        lv.delta_t,
        lv.noise,
        &mut rng,
    )
    .map_err(|e| match e {
        demc_core::Error::Diverged { .. } => HarnessError::Divergence(e),
        other => HarnessError::Config(other.to_string()),
    })
}

/// Observations to fit: the configured data file, else a fresh simulation.
pub fn observations(cfg: &ExperimentConfig) -> Result<TimeSeries> {
    match &cfg.lotka_volterra.data {
        Some(path) => io::read_observations(path),
        None => simulate_observations(cfg),
    }
}

pub fn build_model(cfg: &ExperimentConfig) -> Result<Model> {
    match cfg.target {
        TargetKind::Mvn => {
            let m = &cfg.mvn;
            let t = MvnTarget::new(m.sigma1, m.sigma2, m.rho)
                .map_err(|e| HarnessError::Config(e.to_string()))?;
            Ok(Model::Mvn(t))
        }
        TargetKind::LotkaVolterra => {
            let lv = &cfg.lotka_volterra;
            let data = observations(cfg)?;
            let posterior = LvPosterior::new(
                data,
                lv.initial_state(),
                lv.prior_low,
                lv.prior_high,
                lv.integrator(),
            )
            .map_err(|e| HarnessError::Inconsistent(e.to_string()))?;
            Ok(Model::LotkaVolterra(posterior))
        }
    }
}

/// One starting point per chain, redrawn until the density is positive.
pub fn initial_points(cfg: &ExperimentConfig, model: &Model) -> Result<Vec<ParameterVector>> {
    (0..cfg.chains)
        .map(|chain| {
            let mut rng = RngStream::new(derive_seed(
                cfg.master_seed,
                chain as u64,
                purpose::INITIAL_POINT,
            ));
            for _ in 0..MAX_INITIAL_DRAWS {
                let theta = model.draw_initial(&mut rng);
                let lp = model.target().log_density(&theta);
                if lp > f64::NEG_INFINITY {
                    return Ok(ParameterVector::new(theta)?);
                }
            }
            Err(HarnessError::Initialization(format!(
                "chain {}: no starting point with positive density in {MAX_INITIAL_DRAWS} draws",
                chain + 1
            )))
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct SampleRun {
    pub algorithm: Algorithm,
    pub chains: Vec<ChainHistory>,
    /// Wall-clock time of the sampling loops only.
    pub wall_time_seconds: f64,
}

fn run_one(
    cfg: &ExperimentConfig,
    algorithm: Algorithm,
    target: &dyn TargetDensity,
    chain: usize,
    start: &ParameterVector,
) -> Result<ChainHistory> {
    let seed = derive_seed(cfg.master_seed, chain as u64, purpose::SAMPLER);
    let history = match algorithm {
        Algorithm::Demc => run_demc(target, start.clone(), &cfg.demc_config(seed)),
        Algorithm::Amc => run_amc(target, start.clone(), &cfg.amc_config(seed)),
    };
    history.map_err(|e| match e {
        demc_core::Error::ZeroDensityStart { .. } => HarnessError::Initialization(e.to_string()),
        other => HarnessError::Core(other),
    })
}

/// Runs `cfg.chains` independent chains of `algorithm`.
///
/// Chain `i` is fully determined by the master seed and `i`, so parallel and
/// sequential runs produce identical histories.
pub fn run_chains(
    cfg: &ExperimentConfig,
    model: &Model,
    algorithm: Algorithm,
) -> Result<SampleRun> {
    let starts = initial_points(cfg, model)?;
    let target = model.target();
    let (chains, wall_time_seconds) = if cfg.parallel {
        let clock = Instant::now();
        let results: Vec<Result<ChainHistory>> = std::thread::scope(|scope| {
            let handles: Vec<_> = starts
                .iter()
                .enumerate()
                .map(|(i, s)| scope.spawn(move || run_one(cfg, algorithm, target, i, s)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("sampler thread panicked"))
                .collect()
        });
        let elapsed = clock.elapsed().as_secs_f64();
        (results.into_iter().collect::<Result<Vec<_>>>()?, elapsed)
    } else {
        let mut chains = Vec::with_capacity(starts.len());
        let mut elapsed = 0.0;
        for (i, s) in starts.iter().enumerate() {
            let clock = Instant::now();
            let chain = run_one(cfg, algorithm, target, i, s)?;
            elapsed += clock.elapsed().as_secs_f64();
            chains.push(chain);
        }
        (chains, elapsed)
    };
    Ok(SampleRun {
        algorithm,
        chains,
        wall_time_seconds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(target: TargetKind) -> ExperimentConfig {
        ExperimentConfig {
            target,
            iterations: 300,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn parallel_matches_sequential() {
        let cfg = small(TargetKind::Mvn);
        let model = build_model(&cfg).unwrap();
        for alg in Algorithm::ALL {
            let seq = run_chains(&cfg, &model, alg).unwrap();
            let par = run_chains(
                &ExperimentConfig {
                    parallel: true,
                    ..cfg.clone()
                },
                &model,
                alg,
            )
            .unwrap();
            assert_eq!(seq.chains, par.chains);
            assert_eq!(seq.chains.len(), 3);
            assert!(seq.chains.iter().all(|c| c.len() == 301));
        }
    }

    #[test]
    fn chains_get_distinct_streams() {
        let cfg = small(TargetKind::Mvn);
        let run = run_chains(&cfg, &build_model(&cfg).unwrap(), Algorithm::Demc).unwrap();
        assert_ne!(run.chains[0], run.chains[1]);
        assert_ne!(run.chains[1].states()[0], run.chains[2].states()[0]);
    }

    #[test]
    fn lv_starts_inside_prior() {
        let cfg = small(TargetKind::LotkaVolterra);
        let model = build_model(&cfg).unwrap();
        let Model::LotkaVolterra(post) = &model else {
            unreachable!()
        };
        for p in initial_points(&cfg, &model).unwrap() {
            assert!(post.in_prior(&p));
            assert!(model.target().log_density(&p).is_finite());
        }
    }

    #[test]
    fn impossible_start_is_an_initialization_failure() {
        // Data far outside anything the prior box can reach makes every
        // draw hit the shape floor or the extinction guard.
        let mut cfg = small(TargetKind::LotkaVolterra);
        cfg.lotka_volterra.prior_low = 1e-300;
        cfg.lotka_volterra.prior_high = 2e-300;
        cfg.lotka_volterra.z0 = [0.0, 0.0];
        cfg.lotka_volterra.data = None;
        let data = TimeSeries {
            times: vec![1.0],
            observations: vec![demc_core::ode::OdeState::new(1.0, 1.0)],
        };
        let post = LvPosterior::new(
            data,
            cfg.lotka_volterra.initial_state(),
            1e-300,
            2e-300,
            cfg.lotka_volterra.integrator(),
        )
        .unwrap();
        let err = initial_points(&cfg, &Model::LotkaVolterra(post)).unwrap_err();
        assert_eq!(err.exit_code(), 4);
    }

    #[test]
    fn noise_seed_is_reproducible() {
        let mut cfg = small(TargetKind::LotkaVolterra);
        cfg.lotka_volterra.noise = true;
        let a = simulate_observations(&cfg).unwrap();
        assert_eq!(a, simulate_observations(&cfg).unwrap());
        cfg.master_seed = 2;
        assert_ne!(a, simulate_observations(&cfg).unwrap());
    }

    #[test]
    fn divergent_simulation_maps_to_exit_3() {
        let mut cfg = small(TargetKind::LotkaVolterra);
        cfg.lotka_volterra.theta_true = [100.0, 0.0, 0.0, 0.0];
        let err = simulate_observations(&cfg).unwrap_err();
        assert_eq!(err.exit_code(), 3, "{err}");
    }
}
