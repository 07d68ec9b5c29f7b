//! Experiment configuration.
//!
//! Configs are TOML documents with one flat section per concern. Every field
//! has a default reproducing the published runs, so an empty file is a valid
//! bivariate-normal DEMC experiment. Any field can be overridden from the
//! command line with `--set section.field=value`.

use std::fmt;
use std::path::{Path, PathBuf};

use demc_core::diagnostics::{DEFAULT_BURN, DEFAULT_MAX_LAG, DEFAULT_RETAIN, DEFAULT_SAMPLE_BURN};
use demc_core::ode::{IntegratorConfig, LvParams, OdeState};
use demc_core::targets::MvnTarget;
use demc_core::{default_jump_scale, AmcConfig, DemcConfig};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetKind {
    Mvn,
    LotkaVolterra,
}

impl TargetKind {
    pub fn dimension(self) -> usize {
        match self {
            TargetKind::Mvn => 2,
            TargetKind::LotkaVolterra => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Demc,
    Amc,
}

impl Algorithm {
    pub const ALL: [Algorithm; 2] = [Algorithm::Amc, Algorithm::Demc];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Demc => "demc",
            Algorithm::Amc => "amc",
        }
    }

    /// Label used in summary tables.
    pub fn label(self) -> &'static str {
        match self {
            Algorithm::Demc => "DEMC",
            Algorithm::Amc => "AMC",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "demc" => Ok(Algorithm::Demc),
            "amc" => Ok(Algorithm::Amc),
            other => Err(format!(
                "unknown algorithm `{other}` (expected demc or amc)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MvnSection {
    pub sigma1: f64,
    pub sigma2: f64,
    pub rho: f64,
}

impl Default for MvnSection {
    fn default() -> Self {
        Self {
            sigma1: 1.0,
            sigma2: 1.0,
            rho: 0.99,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LotkaVolterraSection {
    /// `[alpha, beta, gamma, delta]` used to simulate the data.
    pub theta_true: [f64; 4],
    pub z0: [f64; 2],
    pub step_size: f64,
    pub t_start: f64,
    pub t_end: f64,
    pub delta_t: f64,
    pub prior_low: f64,
    pub prior_high: f64,
    /// Replace each simulated observation by a gamma draw around it.
    pub noise: bool,
    /// Observations CSV to fit instead of simulating.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<PathBuf>,
}

impl Default for LotkaVolterraSection {
    fn default() -> Self {
        Self {
            theta_true: [1.0, 0.1, 0.1, 1.0],
            z0: [1.0, 2.0],
            step_size: 0.01,
            t_start: 0.0,
            t_end: 10.0,
            delta_t: 1.0,
            prior_low: 0.0,
            prior_high: 2.0,
            noise: false,
            data: None,
        }
    }
}

impl LotkaVolterraSection {
    pub fn integrator(&self) -> IntegratorConfig {
        IntegratorConfig::new(self.step_size, self.t_start, self.t_end)
    }

    pub fn params(&self) -> LvParams {
        let [a, b, g, d] = self.theta_true;
        LvParams::new(a, b, g, d)
    }

    pub fn initial_state(&self) -> OdeState {
        OdeState::new(self.z0[0], self.z0[1])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DemcSection {
    /// Defaults to `2.38 / sqrt(2 d)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    pub delta: f64,
}

impl Default for DemcSection {
    fn default() -> Self {
        Self {
            gamma: None,
            delta: 0.001,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AmcSection {
    /// Defaults to `2.38 / sqrt(2 d)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    pub adaptation_start: usize,
    /// Row-major initial proposal covariance; identity when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial_covariance: Option<Vec<Vec<f64>>>,
}

impl Default for AmcSection {
    fn default() -> Self {
        Self {
            scale: None,
            adaptation_start: 250,
            initial_covariance: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiagnosticsSection {
    /// Iterations dropped before r-hat, ESS and summaries.
    pub burn: usize,
    pub max_lag: usize,
    /// Iterations dropped before thinning the final sample set.
    pub sample_burn: usize,
    pub retain: usize,
}

impl Default for DiagnosticsSection {
    fn default() -> Self {
        Self {
            burn: DEFAULT_BURN,
            max_lag: DEFAULT_MAX_LAG,
            sample_burn: DEFAULT_SAMPLE_BURN,
            retain: DEFAULT_RETAIN,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub target: TargetKind,
    pub algorithm: Algorithm,
    pub chains: usize,
    pub iterations: usize,
    pub master_seed: u64,
    /// Run chains on separate threads. Timings from parallel runs are not
    /// comparable with sequential ones.
    pub parallel: bool,
    pub mvn: MvnSection,
    pub lotka_volterra: LotkaVolterraSection,
    pub demc: DemcSection,
    pub amc: AmcSection,
    pub diagnostics: DiagnosticsSection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            target: TargetKind::Mvn,
            algorithm: Algorithm::Demc,
            chains: 3,
            iterations: 10_000,
            master_seed: 1,
            parallel: false,
            mvn: MvnSection::default(),
            lotka_volterra: LotkaVolterraSection::default(),
            demc: DemcSection::default(),
            amc: AmcSection::default(),
            diagnostics: DiagnosticsSection::default(),
        }
    }
}

fn bad(msg: impl Into<String>) -> HarnessError {
    HarnessError::Config(msg.into())
}

/// Splices `value` (TOML syntax, or a bare string) at the dotted `path`.
fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<()> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| bad(format!("override `{assignment}` is not key=value")))?;
    let value = match format!("v = {raw}").parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("parsed key"),
        Err(_) => toml::Value::String(raw.trim().to_string()),
    };
    let keys: Vec<&str> = path.trim().split('.').collect();
    let (last, parents) = keys.split_last().expect("split yields one element");
    let mut node = table;
    for key in parents {
        node = node
            .entry(key.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| bad(format!("`{key}` in `{path}` is not a section")))?;
    }
    node.insert(last.to_string(), value);
    Ok(())
}

impl ExperimentConfig {
    /// Parses a TOML document, applies `key=value` overrides and validates.
    pub fn from_toml_str(text: &str, overrides: &[String]) -> Result<Self> {
        let mut table: toml::Table = text.parse().map_err(|e| bad(format!("{e}")))?;
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        let cfg: ExperimentConfig = table.try_into().map_err(|e| bad(format!("{e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Loads `path` (defaults when `None`) with overrides.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let text = match path {
            Some(p) => std::fs::read_to_string(p).map_err(|e| HarnessError::io(p, e))?,
            None => String::new(),
        };
        Self::from_toml_str(&text, overrides)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// SHA-256 of the canonical JSON form; changes iff any field changes.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }

    pub fn dimension(&self) -> usize {
        self.target.dimension()
    }

    pub fn parameter_names(&self) -> Vec<String> {
        match self.target {
            TargetKind::Mvn => vec!["theta_1".into(), "theta_2".into()],
            TargetKind::LotkaVolterra => ["alpha", "beta", "gamma", "delta"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
        }
    }

    pub fn demc_config(&self, seed: u64) -> DemcConfig {
        let mut cfg = DemcConfig::new(self.dimension(), self.iterations, seed);
        if let Some(g) = self.demc.gamma {
            cfg.gamma = g;
        }
        cfg.delta = self.demc.delta;
        cfg
    }

    pub fn amc_config(&self, seed: u64) -> AmcConfig {
        let d = self.dimension();
        let mut cfg = AmcConfig::new(d, self.iterations, seed);
        cfg.scale = self.amc.scale.unwrap_or_else(|| default_jump_scale(d));
        cfg.adaptation_start = self.amc.adaptation_start;
        if let Some(rows) = &self.amc.initial_covariance {
            cfg.initial_covariance = nalgebra_from_rows(rows).expect("validated covariance shape");
        }
        cfg
    }

    pub fn validate(&self) -> Result<()> {
        if self.chains == 0 {
            return Err(bad("chains must be positive"));
        }
        if self.iterations == 0 {
            return Err(bad("iterations must be positive"));
        }
        MvnTarget::new(self.mvn.sigma1, self.mvn.sigma2, self.mvn.rho)
            .map_err(|e| bad(format!("[mvn] {e}")))?;

        let lv = &self.lotka_volterra;
        lv.params()
            .validate()
            .map_err(|e| bad(format!("[lotka_volterra] theta_true: {e}")))?;
        if !lv.z0.iter().all(|v| *v >= 0.0 && v.is_finite()) {
            return Err(bad("[lotka_volterra] z0 must be finite and non-negative"));
        }
        let steps = lv
            .integrator()
            .steps()
            .map_err(|e| bad(format!("[lotka_volterra] {e}")))?;
        let stride = lv.delta_t / lv.step_size;
        if !(lv.delta_t > 0.0)
            || (stride - stride.round()).abs() > 1e-9
            || stride.round() as usize > steps
        {
            return Err(bad(format!(
                "[lotka_volterra] delta_t {} must be a positive multiple of step_size {}",
                lv.delta_t, lv.step_size
            )));
        }
        if !(lv.prior_low < lv.prior_high) {
            return Err(bad("[lotka_volterra] prior_low must be below prior_high"));
        }

        if let Some(g) = self.demc.gamma {
            if !(g > 0.0 && g.is_finite()) {
                return Err(bad("[demc] gamma must be positive"));
            }
        }
        if !(self.demc.delta >= 0.0 && self.demc.delta.is_finite()) {
            return Err(bad("[demc] delta must be non-negative"));
        }
        if let Some(s) = self.amc.scale {
            if !(s > 0.0 && s.is_finite()) {
                return Err(bad("[amc] scale must be positive"));
            }
        }
        if self.amc.adaptation_start == 0 {
            return Err(bad("[amc] adaptation_start must be positive"));
        }
        if let Some(rows) = &self.amc.initial_covariance {
            let m = nalgebra_from_rows(rows)
                .filter(|m| m.nrows() == self.dimension())
                .ok_or_else(|| {
                    bad(format!(
                        "[amc] initial_covariance must be {d}x{d}",
                        d = self.dimension()
                    ))
                })?;
            self.amc_config(0)
                .validate(self.dimension())
                .map_err(|e| bad(format!("[amc] initial_covariance {m}: {e}")))?;
        }

        let d = &self.diagnostics;
        if d.max_lag == 0 || d.retain == 0 {
            return Err(bad("[diagnostics] max_lag and retain must be positive"));
        }
        Ok(())
    }
}

fn nalgebra_from_rows(rows: &[Vec<f64>]) -> Option<nalgebra::DMatrix<f64>> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return None;
    }
    Some(nalgebra::DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}
