//! Chain post-processing: autocorrelation, effective sample size,
//! Gelman-Rubin potential scale reduction, summaries, burn-in and thinning.

use crate::{ChainHistory, Error, Result};

/// Default number of initial states dropped before computing diagnostics.
pub const DEFAULT_BURN: usize = 1000;
/// Default autocorrelation horizon.
pub const DEFAULT_MAX_LAG: usize = 50;
/// Default burn-in before thinning the final sample set.
pub const DEFAULT_SAMPLE_BURN: usize = 2000;
/// Default number of retained samples after thinning.
pub const DEFAULT_RETAIN: usize = 1000;

/// Sample autocorrelation at lags `0..=max_lag`; `rho[0] == 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct AcfCurve {
    pub rho: Vec<f64>,
}

impl AcfCurve {
    pub fn max_lag(&self) -> usize {
        self.rho.len() - 1
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Autocorrelation with the biased (full-series) normalization:
/// `rho[t] = sum_i (x_i - m)(x_{i+t} - m) / sum_i (x_i - m)^2`.
pub fn autocorrelation(samples: &[f64], max_lag: usize) -> Result<AcfCurve> {
    if samples.len() <= max_lag {
        return Err(Error::InsufficientSamples {
            needed: max_lag + 1,
            available: samples.len(),
        });
    }
    let m = mean(samples);
    let centered: Vec<f64> = samples.iter().map(|x| x - m).collect();
    let denom: f64 = centered.iter().map(|c| c * c).sum();
    if !(denom > 0.0) {
        return Err(Error::Degenerate("series has zero variance".into()));
    }
    let mut rho = Vec::with_capacity(max_lag + 1);
    rho.push(1.0);
    for lag in 1..=max_lag {
        let num: f64 = centered
            .iter()
            .zip(&centered[lag..])
            .map(|(a, b)| a * b)
            .sum();
        rho.push(num / denom);
    }
    Ok(AcfCurve { rho })
}

/// `N / (1 + 2 sum_{t=1}^{T} rho[t])`, with `T` the smaller of `max_lag` and
/// the lag preceding the first non-positive autocorrelation.
pub fn effective_sample_size(samples: &[f64], max_lag: usize) -> Result<f64> {
    let acf = autocorrelation(samples, max_lag)?;
    let tail: f64 = acf.rho[1..].iter().take_while(|&&r| r > 0.0).sum();
    Ok(samples.len() as f64 / (1.0 + 2.0 * tail))
}

fn sample_variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// Classic Gelman-Rubin statistic for `m >= 2` chains of equal length
/// `n >= 4`:
/// `sqrt((n-1)/n + (B/n) / W)`, with `W` the mean within-chain variance and
/// `B/n` the variance of the chain means.
pub fn gelman_rubin<C: AsRef<[f64]>>(chains: &[C]) -> Result<f64> {
    if chains.len() < 2 {
        return Err(Error::InsufficientSamples {
            needed: 2,
            available: chains.len(),
        });
    }
    let n = chains[0].as_ref().len();
    if n < 4 {
        return Err(Error::InsufficientSamples {
            needed: 4,
            available: n,
        });
    }
    if let Some(c) = chains.iter().find(|c| c.as_ref().len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: c.as_ref().len(),
        });
    }
    let means: Vec<f64> = chains.iter().map(|c| mean(c.as_ref())).collect();
    let within = chains
        .iter()
        .map(|c| sample_variance(c.as_ref()))
        .sum::<f64>()
        / chains.len() as f64;
    if !(within > 0.0) {
        return Err(Error::Degenerate("all chains are constant".into()));
    }
    let between_over_n = sample_variance(&means);
    let nf = n as f64;
    Ok(((nf - 1.0) / nf + between_over_n / within).sqrt())
}

/// Point summary of one parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterSummary {
    /// Value at the highest recorded log-density.
    pub map: f64,
    pub mean: f64,
    /// Pooled sd with `n - 1` denominator.
    pub sd: f64,
    /// Set when a single sample makes the sd undefined (reported as 0).
    pub degenerate: bool,
}

/// Pooled MaP / mean / sd per parameter over a set of chains.
pub fn summarize(chains: &[ChainHistory]) -> Result<Vec<ParameterSummary>> {
    let first = chains.first().ok_or(Error::InsufficientSamples {
        needed: 1,
        available: 0,
    })?;
    let d = first.dimension();
    if let Some(c) = chains.iter().find(|c| c.dimension() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            actual: c.dimension(),
        });
    }
    let mut best = &first.states()[0];
    for state in chains.iter().flat_map(|c| c.states()) {
        if state.log_density > best.log_density {
            best = state;
        }
    }
    let n: usize = chains.iter().map(|c| c.len()).sum();
    let summaries = (0..d)
        .map(|dim| {
            let values: Vec<f64> = chains.iter().flat_map(|c| c.component(dim)).collect();
            let m = mean(&values);
            let (sd, degenerate) = if n < 2 {
                (0.0, true)
            } else {
                (sample_variance(&values).sqrt(), false)
            };
            ParameterSummary {
                map: best.theta[dim],
                mean: m,
                sd,
                degenerate,
            }
        })
        .collect();
    Ok(summaries)
}

/// Indices kept by [`burn_and_thin`] for a chain of length `len`.
///
/// After dropping the first `burn` indices, `retain` indices are spread
/// evenly over the rest, always including its first and last index.
pub fn thin_indices(len: usize, burn: usize, retain: usize) -> Result<Vec<usize>> {
    let remaining = len.saturating_sub(burn);
    if retain == 0 || remaining < retain {
        return Err(Error::InsufficientSamples {
            needed: burn + retain.max(1),
            available: len,
        });
    }
    if retain == 1 {
        return Ok(vec![burn]);
    }
    let span = remaining - 1;
    let gaps = retain - 1;
    Ok((0..retain)
        .map(|i| burn + (i * span + gaps / 2) / gaps)
        .collect())
}

pub fn burn_and_thin(chain: &ChainHistory, burn: usize, retain: usize) -> Result<ChainHistory> {
    let idx = thin_indices(chain.len(), burn, retain)?;
    Ok(chain.select(&idx))
}

/// Drops the first `burn` states.
pub fn burn(chain: &ChainHistory, burn: usize) -> Result<ChainHistory> {
    if burn >= chain.len() {
        return Err(Error::InsufficientSamples {
            needed: burn + 1,
            available: chain.len(),
        });
    }
    let idx: Vec<usize> = (burn..chain.len()).collect();
    Ok(chain.select(&idx))
}

/// Linear-interpolation quantile (Hyndman-Fan type 7) of sorted data.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty data");
    let h = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn quantile(data: &[f64], p: f64) -> f64 {
    let mut sorted = data.to_vec();
    sorted.sort_by(f64::total_cmp);
    quantile_sorted(&sorted, p)
}

/// One row of a diagnostics table.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterDiagnostics {
    pub name: String,
    pub map: f64,
    pub mean: f64,
    pub sd: f64,
    pub r_hat: f64,
    pub ess: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsReport {
    pub parameters: Vec<ParameterDiagnostics>,
    pub wall_time_seconds: Option<f64>,
}

/// Builds the per-parameter table from full chains.
///
/// Each chain loses its first `burn` states. `r_hat` compares the burnt
/// chains; ESS is computed per burnt chain and averaged across chains;
/// MaP, mean and sd are pooled.
pub fn diagnose(
    chains: &[ChainHistory],
    names: &[String],
    burn_in: usize,
    max_lag: usize,
) -> Result<DiagnosticsReport> {
    let burnt: Vec<ChainHistory> = chains
        .iter()
        .map(|c| burn(c, burn_in))
        .collect::<Result<_>>()?;
    let summaries = summarize(&burnt)?;
    if names.len() != summaries.len() {
        return Err(Error::DimensionMismatch {
            expected: summaries.len(),
            actual: names.len(),
        });
    }
    let mut parameters = Vec::with_capacity(names.len());
    for (dim, (name, s)) in names.iter().zip(summaries).enumerate() {
        let columns: Vec<Vec<f64>> = burnt.iter().map(|c| c.component(dim)).collect();
        let r_hat = gelman_rubin(&columns)?;
        let ess = columns
            .iter()
            .map(|c| effective_sample_size(c, max_lag))
            .sum::<Result<f64>>()?
            / columns.len() as f64;
        parameters.push(ParameterDiagnostics {
            name: name.clone(),
            map: s.map,
            mean: s.mean,
            sd: s.sd,
            r_hat,
            ess,
        });
    }
    Ok(DiagnosticsReport {
        parameters,
        wall_time_seconds: None,
    })
}
