//! Plot-ready CSV tables: traces, autocorrelation, retained samples,
//! reference draws and posterior-predictive bands.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use demc_core::diagnostics::{autocorrelation, burn, quantile_sorted, thin_indices};
use demc_core::ode::{integrate_rk4, LvParams};
use demc_core::targets::MvnTarget;
use demc_core::{
    derive_seed, regularized_cholesky, sample_gaussian_with_factor, ChainHistory, ChainState,
    RngStream,
};

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::experiment::{purpose, Model};
use crate::io::{push_row, write_text};

fn state_header(names: &[String]) -> Vec<String> {
    let mut h = vec!["chain".to_string(), "iteration".to_string()];
    h.extend(names.iter().cloned());
    h.push("log_post".into());
    h
}

fn push_state(out: &mut String, chain: usize, iteration: usize, s: &ChainState) {
    write!(out, "{chain},{iteration}").expect("write to String");
    for v in s.theta.iter() {
        write!(out, ",{v}").expect("write to String");
    }
    writeln!(out, ",{}", s.log_density).expect("write to String");
}

fn insufficient(e: demc_core::Error) -> HarnessError {
    HarnessError::Inconsistent(format!("chains too short for plot settings: {e}"))
}

/// Every state of every chain.
pub fn trace_full(chains: &[ChainHistory], names: &[String]) -> String {
    let mut out = String::new();
    push_row(&mut out, state_header(names));
    for (c, chain) in chains.iter().enumerate() {
        for (i, s) in chain.states().iter().enumerate() {
            push_state(&mut out, c + 1, i, s);
        }
    }
    out
}

/// Per chain: drop `sample_burn` states and keep `retain` evenly spaced.
pub fn trace_thinned(
    chains: &[ChainHistory],
    names: &[String],
    sample_burn: usize,
    retain: usize,
) -> Result<String> {
    let mut out = String::new();
    push_row(&mut out, state_header(names));
    for (c, chain) in chains.iter().enumerate() {
        for i in thin_indices(chain.len(), sample_burn, retain).map_err(insufficient)? {
            push_state(&mut out, c + 1, i, &chain.states()[i]);
        }
    }
    Ok(out)
}

/// Final sample set: chains burnt, concatenated, then thinned to `retain`
/// evenly spaced states. Entries are `(chain, iteration, state)`.
pub fn pooled_samples(
    chains: &[ChainHistory],
    sample_burn: usize,
    retain: usize,
) -> Result<Vec<(usize, usize, &ChainState)>> {
    let pooled: Vec<(usize, usize, &ChainState)> = chains
        .iter()
        .enumerate()
        .flat_map(|(c, chain)| {
            chain
                .states()
                .iter()
                .enumerate()
                .skip(sample_burn)
                .map(move |(i, s)| (c + 1, i, s))
        })
        .collect();
    let idx = thin_indices(pooled.len(), 0, retain).map_err(insufficient)?;
    Ok(idx.into_iter().map(|i| pooled[i]).collect())
}

pub fn samples_csv(samples: &[(usize, usize, &ChainState)], names: &[String]) -> String {
    let mut out = String::new();
    push_row(&mut out, state_header(names));
    for (c, i, s) in samples {
        push_state(&mut out, *c, *i, s);
    }
    out
}

/// `chain,parameter,lag,rho` for lags `0..=max_lag` after `burn_in`.
pub fn acf_csv(
    chains: &[ChainHistory],
    names: &[String],
    burn_in: usize,
    max_lag: usize,
) -> Result<String> {
    let mut out = String::new();
    push_row(&mut out, ["chain", "parameter", "lag", "rho"]);
    for (c, chain) in chains.iter().enumerate() {
        let kept = burn(chain, burn_in).map_err(insufficient)?;
        for (dim, name) in names.iter().enumerate() {
            let curve = autocorrelation(&kept.component(dim), max_lag)
                .map_err(|e| HarnessError::Inconsistent(format!("chain {}, {name}: {e}", c + 1)))?;
            for (lag, rho) in curve.rho.iter().enumerate() {
                writeln!(out, "{},{name},{lag},{rho}", c + 1).expect("write to String");
            }
        }
    }
    Ok(out)
}

/// Exact draws from the Gaussian target for side-by-side comparison.
pub fn reference_draws(target: &MvnTarget, count: usize, seed: u64) -> Result<String> {
    let cov = target.covariance();
    let factor = regularized_cholesky(&nalgebra::DMatrix::from_fn(2, 2, |i, j| cov[i][j]))?;
    let mut rng = RngStream::new(seed);
    let mut out = String::new();
    push_row(&mut out, ["theta_1", "theta_2"]);
    for _ in 0..count {
        let z = sample_gaussian_with_factor(&[0.0, 0.0], &factor, &mut rng);
        writeln!(out, "{},{}", z[0], z[1]).expect("write to String");
    }
    Ok(out)
}

/// Best-fit trajectory (highest log-posterior sample over all chains after
/// `burn_in`) and 5% / 95% pointwise bands over the retained samples.
pub fn fit_csv(
    cfg: &ExperimentConfig,
    chains: &[ChainHistory],
    samples: &[(usize, usize, &ChainState)],
) -> Result<String> {
    let lv = &cfg.lotka_volterra;
    let integrator = lv.integrator();
    let best = chains
        .iter()
        .flat_map(|c| c.states().iter().skip(cfg.diagnostics.burn))
        .max_by(|a, b| a.log_density.total_cmp(&b.log_density))
        .ok_or_else(|| HarnessError::Inconsistent("no states after burn-in".into()))?;
    let best_traj = integrate_rk4(
        &LvParams::from_slice(&best.theta)?,
        lv.initial_state(),
        &integrator,
    )?;

    let n = best_traj.len();
    let mut xs: Vec<Vec<f64>> = vec![Vec::with_capacity(samples.len()); n];
    let mut ys: Vec<Vec<f64>> = vec![Vec::with_capacity(samples.len()); n];
    for (_, _, s) in samples {
        // Retained states have positive density, so their trajectories exist.
        let traj = integrate_rk4(
            &LvParams::from_slice(&s.theta)?,
            lv.initial_state(),
            &integrator,
        )?;
        for (k, z) in traj.states.iter().enumerate() {
            xs[k].push(z.x);
            ys[k].push(z.y);
        }
    }
    let mut out = String::new();
    push_row(
        &mut out,
        ["t", "x_best", "y_best", "x_q05", "x_q95", "y_q05", "y_q95"],
    );
    for k in 0..n {
        xs[k].sort_by(f64::total_cmp);
        ys[k].sort_by(f64::total_cmp);
        let z = best_traj.states[k];
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            best_traj.times[k],
            z.x,
            z.y,
            quantile_sorted(&xs[k], 0.05),
            quantile_sorted(&xs[k], 0.95),
            quantile_sorted(&ys[k], 0.05),
            quantile_sorted(&ys[k], 0.95)
        )
        .expect("write to String");
    }
    Ok(out)
}

/// Writes every plot table for one algorithm's chains into `dir`.
pub fn write_plot_data(
    cfg: &ExperimentConfig,
    model: &Model,
    chains: &[ChainHistory],
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    let names = cfg.parameter_names();
    let d = &cfg.diagnostics;
    let samples = pooled_samples(chains, d.sample_burn, d.retain)?;
    let mut files = vec![
        ("trace_full.csv", trace_full(chains, &names)),
        (
            "trace_thinned.csv",
            trace_thinned(chains, &names, d.sample_burn, d.retain)?,
        ),
        ("samples.csv", samples_csv(&samples, &names)),
        ("acf.csv", acf_csv(chains, &names, d.burn, d.max_lag)?),
    ];
    match model {
        Model::Mvn(target) => {
            let seed = derive_seed(cfg.master_seed, 0, purpose::REFERENCE_DRAWS);
            files.push(("reference.csv", reference_draws(target, d.retain, seed)?));
        }
        Model::LotkaVolterra(_) => files.push(("fit.csv", fit_csv(cfg, chains, &samples)?)),
    }
    let mut written = Vec::with_capacity(files.len());
    for (name, text) in files {
        let path = dir.join(name);
        write_text(&path, &text)?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use demc_core::ParameterVector;

    fn chain(n: usize, offset: f64) -> ChainHistory {
        ChainHistory::from_states(
            (0..n)
                .map(|i| ChainState {
                    theta: ParameterVector::new(vec![i as f64 + offset, ((i * 7) % 5) as f64])
                        .unwrap(),
                    log_density: -(i as f64),
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn pooled_samples_span_all_chains() {
        let chains = [chain(11, 0.0), chain(11, 100.0)];
        let s = pooled_samples(&chains, 1, 5).unwrap();
        let picked: Vec<(usize, usize)> = s.iter().map(|(c, i, _)| (*c, *i)).collect();
        // 20 pooled states, spacing 19/4 rounded.
        assert_eq!(picked, [(1, 1), (1, 6), (2, 1), (2, 5), (2, 10)]);
    }

    #[test]
    fn table_shapes() {
        let chains = [chain(30, 0.0), chain(30, 1.0)];
        let names = vec!["a".to_string(), "b".to_string()];
        assert_eq!(trace_full(&chains, &names).lines().count(), 61);
        assert_eq!(
            trace_thinned(&chains, &names, 10, 5)
                .unwrap()
                .lines()
                .count(),
            11
        );
        let acf = acf_csv(&chains, &names, 5, 4).unwrap();
        assert_eq!(acf.lines().count(), 1 + 2 * 2 * 5);
        assert!(acf.lines().nth(1).unwrap().starts_with("1,a,0,1"));
        assert_eq!(
            trace_thinned(&chains, &names, 28, 5)
                .unwrap_err()
                .exit_code(),
            5
        );
    }

    #[test]
    fn reference_draws_have_target_correlation() {
        let t = MvnTarget::new(1.0, 1.0, 0.99).unwrap();
        let text = reference_draws(&t, 20_000, 3).unwrap();
        let rows: Vec<(f64, f64)> = text
            .lines()
            .skip(1)
            .map(|l| {
                let (a, b) = l.split_once(',').unwrap();
                (a.parse().unwrap(), b.parse().unwrap())
            })
            .collect();
        let n = rows.len() as f64;
        let sxy: f64 = rows.iter().map(|(a, b)| a * b).sum::<f64>() / n;
        let sxx: f64 = rows.iter().map(|(a, _)| a * a).sum::<f64>() / n;
        let syy: f64 = rows.iter().map(|(_, b)| b * b).sum::<f64>() / n;
        assert!((sxy / (sxx * syy).sqrt() - 0.99).abs() < 0.003);
    }
}
