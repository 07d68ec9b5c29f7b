//! Subcommand implementations. Each returns the paths it wrote.

use std::path::{Path, PathBuf};

use demc_core::ChainHistory;
use serde::Serialize;

use crate::config::{Algorithm, ExperimentConfig, TargetKind};
use crate::error::{HarnessError, Result};
use crate::experiment::{build_model, observations, run_chains, SampleRun};
use crate::io::{self, write_json, write_text};
use crate::plots::write_plot_data;
use crate::report::{build_report, markdown_table, Report, Timing};

pub fn chain_file_name(algorithm: Algorithm, chain: usize) -> String {
    format!("{algorithm}_chain_{chain}.csv")
}

pub fn timing_file_name(algorithm: Algorithm) -> String {
    format!("{algorithm}_timing.json")
}

/// Writes the observations the LV posterior is fitted to.
pub fn simulate(cfg: &ExperimentConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let series = observations(cfg)?;
    let path = out.join("observations.csv");
    write_text(&path, &io::observations_to_csv(&series))?;
    Ok(vec![path])
}

fn write_run(
    cfg: &ExperimentConfig,
    run: &SampleRun,
    dir: &Path,
) -> Result<(Vec<PathBuf>, PathBuf)> {
    let mut chain_paths = Vec::with_capacity(run.chains.len());
    for (i, chain) in run.chains.iter().enumerate() {
        let path = dir.join(chain_file_name(run.algorithm, i + 1));
        write_text(&path, &io::chain_to_csv(chain))?;
        chain_paths.push(path);
    }
    let timing = Timing {
        algorithm: run.algorithm,
        target: cfg.target,
        chains: cfg.chains,
        iterations: cfg.iterations,
        parallel: cfg.parallel,
        wall_time_seconds: run.wall_time_seconds,
    };
    let timing_path = dir.join(timing_file_name(run.algorithm));
    write_json(&timing_path, &timing)?;
    Ok((chain_paths, timing_path))
}

/// Runs `cfg.algorithm` and writes one CSV per chain plus a timing file.
/// For the ODE target the fitted observations are written alongside.
pub fn sample(cfg: &ExperimentConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let model = build_model(cfg)?;
    let run = run_chains(cfg, &model, cfg.algorithm)?;
    let (mut written, timing) = write_run(cfg, &run, out)?;
    written.push(timing);
    if cfg.target == TargetKind::LotkaVolterra {
        written.extend(simulate(cfg, out)?);
    }
    Ok(written)
}

fn read_chains(paths: &[PathBuf]) -> Result<Vec<ChainHistory>> {
    paths.iter().map(|p| io::read_chain(p)).collect()
}

fn write_report(report: &Report, dir: &Path) -> Result<Vec<PathBuf>> {
    let json = dir.join(format!("report_{}.json", report.algorithm));
    let md = dir.join(format!("report_{}.md", report.algorithm));
    write_json(&json, report)?;
    write_text(&md, &markdown_table(&[report]))?;
    Ok(vec![json, md])
}

/// Diagnoses chain files. The algorithm label and wall time come from the
/// timing file when given, else from the config.
pub fn diagnose(
    cfg: &ExperimentConfig,
    chain_paths: &[PathBuf],
    timing: Option<&Path>,
    out: &Path,
) -> Result<Vec<PathBuf>> {
    let timing: Option<Timing> = timing
        .map(|p| {
            serde_json::from_str(&io::read_text(p)?)
                .map_err(|e| HarnessError::Inconsistent(format!("{}: {e}", p.display())))
        })
        .transpose()?;
    if let Some(t) = &timing {
        if t.target != cfg.target {
            return Err(HarnessError::Inconsistent(format!(
                "timing file is for target {:?}, config says {:?}",
                t.target, cfg.target
            )));
        }
    }
    let algorithm = timing.as_ref().map_or(cfg.algorithm, |t| t.algorithm);
    let chains = read_chains(chain_paths)?;
    let report = build_report(cfg, algorithm, &chains, timing.map(|t| t.wall_time_seconds))?;
    write_report(&report, out)
}

pub fn plotdata(
    cfg: &ExperimentConfig,
    chain_paths: &[PathBuf],
    out: &Path,
) -> Result<Vec<PathBuf>> {
    let chains = read_chains(chain_paths)?;
    crate::report::check_chains(&chains, cfg.dimension())?;
    let model = build_model(cfg)?;
    write_plot_data(cfg, &model, &chains, out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Case {
    /// Bivariate normal, both algorithms.
    Table1,
    /// Lotka-Volterra posterior, both algorithms.
    Table2,
}

impl Case {
    pub fn target(self) -> TargetKind {
        match self {
            Case::Table1 => TargetKind::Mvn,
            Case::Table2 => TargetKind::LotkaVolterra,
        }
    }
}

#[derive(Debug, Serialize)]
struct Manifest {
    case: Case,
    config_hash: String,
    master_seed: u64,
    versions: Versions,
    artifacts: Vec<String>,
}

#[derive(Debug, Serialize)]
struct Versions {
    demc_core: &'static str,
    demc_harness: &'static str,
}

/// Runs both samplers on the case's target and writes chains, reports,
/// a combined table, plot data, the resolved config and a manifest.
pub fn reproduce(base: &ExperimentConfig, case: Case, out: &Path) -> Result<Vec<PathBuf>> {
    let cfg = ExperimentConfig {
        target: case.target(),
        ..base.clone()
    };
    cfg.validate()?;
    let mut written = Vec::new();
    write_text(&out.join("config.toml"), &cfg.to_toml_string())?;
    written.push(out.join("config.toml"));
    if cfg.target == TargetKind::LotkaVolterra {
        written.extend(simulate(&cfg, out)?);
    }

    let model = build_model(&cfg)?;
    let mut reports = Vec::new();
    for algorithm in Algorithm::ALL {
        let run = run_chains(&cfg, &model, algorithm)?;
        let (chains, timing) = write_run(&cfg, &run, &out.join("chains"))?;
        written.extend(chains);
        written.push(timing);
        let report = build_report(&cfg, algorithm, &run.chains, Some(run.wall_time_seconds))?;
        written.extend(write_report(&report, &out.join("reports"))?);
        written.extend(write_plot_data(
            &cfg,
            &model,
            &run.chains,
            &out.join("plots").join(algorithm.as_str()),
        )?);
        reports.push(report);
    }
    let table = out.join("table.md");
    write_text(&table, &markdown_table(&reports.iter().collect::<Vec<_>>()))?;
    written.push(table);

    let manifest_path = out.join("manifest.json");
    let mut artifacts: Vec<String> = written
        .iter()
        .map(|p| p.strip_prefix(out).unwrap_or(p).display().to_string())
        .collect();
    artifacts.push("manifest.json".into());
    artifacts.sort();
    let manifest = Manifest {
        case,
        config_hash: cfg.hash(),
        master_seed: cfg.master_seed,
        versions: Versions {
            demc_core: demc_core::VERSION,
            demc_harness: env!("CARGO_PKG_VERSION"),
        },
        artifacts,
    };
    write_json(&manifest_path, &manifest)?;
    written.push(manifest_path);
    Ok(written)
}
