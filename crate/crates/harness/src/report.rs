//! Diagnostics reports in JSON and markdown.

use std::fmt::Write as _;

use demc_core::diagnostics::{diagnose, DiagnosticsReport};
use demc_core::ChainHistory;
use serde::{Deserialize, Serialize};

use crate::config::{Algorithm, ExperimentConfig, TargetKind};
use crate::error::{HarnessError, Result};

/// How per-chain ESS values are combined in reports.
pub const ESS_AGGREGATION: &str = "mean_over_chains";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterRow {
    pub name: String,
    pub map: f64,
    pub mean: f64,
    pub sd: f64,
    pub r_hat: f64,
    pub ess: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config_hash: String,
    pub algorithm: Algorithm,
    pub target: TargetKind,
    pub wall_time_seconds: Option<f64>,
    pub chains: usize,
    pub iterations_per_chain: usize,
    pub burn: usize,
    pub max_lag: usize,
    pub ess_aggregation: String,
    pub parameters: Vec<ParameterRow>,
}

/// Timing sidecar written by `sample`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub algorithm: Algorithm,
    pub target: TargetKind,
    pub chains: usize,
    pub iterations: usize,
    pub parallel: bool,
    pub wall_time_seconds: f64,
}

/// Checks that chains can be compared and returns their common length.
pub fn check_chains(chains: &[ChainHistory], dimension: usize) -> Result<usize> {
    if chains.len() < 2 {
        return Err(HarnessError::Inconsistent(format!(
            "diagnostics need at least 2 chains, got {}",
            chains.len()
        )));
    }
    let len = chains[0].len();
    for (i, c) in chains.iter().enumerate() {
        if c.dimension() != dimension {
            return Err(HarnessError::Inconsistent(format!(
                "chain {} has dimension {}, target has {dimension}",
                i + 1,
                c.dimension()
            )));
        }
        if c.len() != len {
            return Err(HarnessError::Inconsistent(format!(
                "chain {} has {} states, chain 1 has {len}",
                i + 1,
                c.len()
            )));
        }
    }
    Ok(len)
}

pub fn build_report(
    cfg: &ExperimentConfig,
    algorithm: Algorithm,
    chains: &[ChainHistory],
    wall_time_seconds: Option<f64>,
) -> Result<Report> {
    let len = check_chains(chains, cfg.dimension())?;
    let d = &cfg.diagnostics;
    let DiagnosticsReport { parameters, .. } =
        diagnose(chains, &cfg.parameter_names(), d.burn, d.max_lag)
            .map_err(|e| HarnessError::Inconsistent(e.to_string()))?;
    Ok(Report {
        config_hash: cfg.hash(),
        algorithm,
        target: cfg.target,
        wall_time_seconds,
        chains: chains.len(),
        iterations_per_chain: len - 1,
        burn: d.burn,
        max_lag: d.max_lag,
        ess_aggregation: ESS_AGGREGATION.into(),
        parameters: parameters
            .into_iter()
            .map(|p| ParameterRow {
                name: p.name,
                map: p.map,
                mean: p.mean,
                sd: p.sd,
                r_hat: p.r_hat,
                ess: p.ess,
            })
            .collect(),
    })
}

const TABLE_HEADER: &str = "| Algorithm | Dim. | MaP | mean | sd | r-hat | Time (s) | ESS |\n\
                            |---|---|---|---|---|---|---|---|\n";

fn push_rows(out: &mut String, report: &Report) {
    for (i, p) in report.parameters.iter().enumerate() {
        let (label, time) = if i == 0 {
            let t = report
                .wall_time_seconds
                .map_or_else(|| "-".to_string(), |t| format!("{t:.3}"));
            (report.algorithm.label(), t)
        } else {
            ("", String::new())
        };
        writeln!(
            out,
            "| {label} | {} | {:.4} | {:.4} | {:.4} | {:.4} | {time} | {:.1} |",
            p.name, p.map, p.mean, p.sd, p.r_hat, p.ess
        )
        .expect("write to String");
    }
}

/// One markdown table with a row block per report.
pub fn markdown_table(reports: &[&Report]) -> String {
    let mut out = String::from(TABLE_HEADER);
    for r in reports {
        push_rows(&mut out, r);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use demc_core::{ChainState, ParameterVector};

    fn chain(values: &[f64]) -> ChainHistory {
        ChainHistory::from_states(
            values
                .iter()
                .map(|v| ChainState {
                    theta: ParameterVector::new(vec![*v, -*v]).unwrap(),
                    log_density: -v * v,
                })
                .collect(),
        )
        .unwrap()
    }

    fn cfg() -> ExperimentConfig {
        let mut c = ExperimentConfig::default();
        c.diagnostics.burn = 2;
        c.diagnostics.max_lag = 3;
        c
    }

    #[test]
    fn report_fields() {
        let a = chain(&[9.0, 9.0, 0.0, 1.0, -1.0, 0.5]);
        let b = chain(&[9.0, 9.0, 0.2, -0.7, 0.9, -0.3]);
        let r = build_report(&cfg(), Algorithm::Demc, &[a, b], Some(1.5)).unwrap();
        assert_eq!(r.iterations_per_chain, 5);
        assert_eq!(r.parameters.len(), 2);
        assert_eq!(r.parameters[0].name, "theta_1");
        assert_eq!(r.parameters[0].map, 0.0);
        assert_eq!(r.parameters[1].map, 0.0);
        let json = serde_json::to_value(&r).unwrap();
        for key in [
            "config_hash",
            "algorithm",
            "wall_time_seconds",
            "parameters",
        ] {
            assert!(json.get(key).is_some(), "{key}");
        }
        for key in ["name", "map", "mean", "sd", "r_hat", "ess"] {
            assert!(json["parameters"][0].get(key).is_some(), "{key}");
        }
        let md = markdown_table(&[&r]);
        assert_eq!(md.lines().count(), 4);
        assert!(md.contains("| DEMC | theta_1 | 0.0000 |"));
        assert!(md.contains("1.500"));
    }

    #[test]
    fn inconsistent_chain_sets() {
        let c = cfg();
        let one = [chain(&[0.0; 6])];
        assert_eq!(
            build_report(&c, Algorithm::Amc, &one, None)
                .unwrap_err()
                .exit_code(),
            5
        );
        let uneven = [chain(&[0.0, 1.0, 2.0, 3.0]), chain(&[0.0, 1.0, 2.0])];
        assert_eq!(
            build_report(&c, Algorithm::Amc, &uneven, None)
                .unwrap_err()
                .exit_code(),
            5
        );
        let mut lv = c.clone();
        lv.target = TargetKind::LotkaVolterra;
        let pair = [chain(&[0.0, 1.0, 2.0, 3.0]), chain(&[0.0, 1.0, 2.0, 3.0])];
        assert_eq!(
            build_report(&lv, Algorithm::Amc, &pair, None)
                .unwrap_err()
                .exit_code(),
            5
        );
    }
}
