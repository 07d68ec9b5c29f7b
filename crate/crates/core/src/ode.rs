//! Fixed-step RK4 integration of the Lotka-Volterra predator-prey system
//!
//! ```text
//! dx/dt = alpha x - beta x y
//! dy/dt = gamma_lv x y - delta_lv y
//! ```
//!
//! and extraction of observations on a regular time grid.

use crate::{Error, Result};

/// Prey (`x`) and predator (`y`) densities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeState {
    pub x: f64,
    pub y: f64,
}

impl OdeState {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    fn as_array(self) -> [f64; 2] {
        [self.x, self.y]
    }

    fn from_array(a: [f64; 2]) -> Self {
        Self { x: a[0], y: a[1] }
    }
}

/// Lotka-Volterra rates, all non-negative and per unit time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LvParams {
    /// Prey growth rate.
    pub alpha: f64,
    /// Predation rate.
    pub beta: f64,
    /// Predator conversion rate.
    pub gamma_lv: f64,
    /// Predator death rate.
    pub delta_lv: f64,
}

impl LvParams {
    pub fn new(alpha: f64, beta: f64, gamma_lv: f64, delta_lv: f64) -> Self {
        Self {
            alpha,
            beta,
            gamma_lv,
            delta_lv,
        }
    }

    /// Reads `[alpha, beta, gamma_lv, delta_lv]`.
    pub fn from_slice(theta: &[f64]) -> Result<Self> {
        match theta {
            [a, b, g, d] => Ok(Self::new(*a, *b, *g, *d)),
            _ => Err(Error::DimensionMismatch {
                expected: 4,
                actual: theta.len(),
            }),
        }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.alpha, self.beta, self.gamma_lv, self.delta_lv]
    }

    pub fn validate(&self) -> Result<()> {
        if self.to_array().iter().all(|v| *v >= 0.0 && v.is_finite()) {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "Lotka-Volterra rates must be finite and non-negative: {self:?}"
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub step_size: f64,
    pub t_start: f64,
    pub t_end: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            step_size: 0.01,
            t_start: 0.0,
            t_end: 10.0,
        }
    }
}

impl IntegratorConfig {
    pub fn new(step_size: f64, t_start: f64, t_end: f64) -> Self {
        Self {
            step_size,
            t_start,
            t_end,
        }
    }

    /// Number of steps covering `[t_start, t_end]`; the span must be an
    /// integer multiple of the step within 1e-9.
    pub fn steps(&self) -> Result<usize> {
        if !(self.step_size > 0.0 && self.step_size.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "step size must be positive, got {}",
                self.step_size
            )));
        }
        if !(self.t_end > self.t_start) || !self.t_end.is_finite() || !self.t_start.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "need t_end > t_start, got [{}, {}]",
                self.t_start, self.t_end
            )));
        }
        let ratio = (self.t_end - self.t_start) / self.step_size;
        let steps = ratio.round();
        if (ratio - steps).abs() > 1e-9 {
            return Err(Error::InvalidConfig(format!(
                "span {} is not a multiple of step {}",
                self.t_end - self.t_start,
                self.step_size
            )));
        }
        Ok(steps as usize)
    }
}

/// Integrated solution on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<OdeState>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn step_size(&self) -> f64 {
        if self.times.len() < 2 {
            0.0
        } else {
            self.times[1] - self.times[0]
        }
    }
}

/// Observed states at discrete times.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub observations: Vec<OdeState>,
}

impl TimeSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Checks the invariants required by the gamma likelihood: strictly
    /// increasing times and strictly positive observations.
    pub fn validate(&self) -> Result<()> {
        if self.times.len() != self.observations.len() || self.times.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "time series with {} times and {} observations",
                self.times.len(),
                self.observations.len()
            )));
        }
        if self.times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter(
                "observation times must increase".into(),
            ));
        }
        if let Some(o) = self
            .observations
            .iter()
            .find(|o| !(o.x > 0.0 && o.y > 0.0 && o.x.is_finite() && o.y.is_finite()))
        {
            return Err(Error::InvalidParameter(format!(
                "observations must be strictly positive, found {o:?}"
            )));
        }
        Ok(())
    }
}

pub fn lv_derivative(z: OdeState, p: &LvParams) -> (f64, f64) {
    let dx = p.alpha * z.x - p.beta * z.x * z.y;
    let dy = p.gamma_lv * z.x * z.y - p.delta_lv * z.y;
    (dx, dy)
}

/// One classical fourth-order Runge-Kutta step for `dz/dt = f(t, z)`.
pub fn rk4_step<const N: usize, F>(f: F, t: f64, z: &[f64; N], h: f64) -> [f64; N]
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let offset = |base: &[f64; N], k: &[f64; N], s: f64| {
        let mut out = *base;
        for (o, ki) in out.iter_mut().zip(k) {
            *o += s * ki;
        }
        out
    };
    let k1 = f(t, z);
    let k2 = f(t + 0.5 * h, &offset(z, &k1, 0.5 * h));
    let k3 = f(t + 0.5 * h, &offset(z, &k2, 0.5 * h));
    let k4 = f(t + h, &offset(z, &k3, h));
    let mut next = *z;
    for i in 0..N {
        next[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    next
}

/// Integrates the system from `z0` over `cfg`'s grid.
///
/// Fails with [`Error::Diverged`] at the first node holding a negative or
/// non-finite component.
pub fn integrate_rk4(p: &LvParams, z0: OdeState, cfg: &IntegratorConfig) -> Result<Trajectory> {
    let steps = cfg.steps()?;
    if !(z0.x >= 0.0 && z0.y >= 0.0 && z0.x.is_finite() && z0.y.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "initial state must be finite and non-negative: {z0:?}"
        )));
    }
    let h = cfg.step_size;
    let rhs = |_: f64, z: &[f64; 2]| {
        let (dx, dy) = lv_derivative(OdeState::from_array(*z), p);
        [dx, dy]
    };

    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut z = z0.as_array();
    times.push(cfg.t_start);
    states.push(z0);
    for i in 1..=steps {
        let t_prev = cfg.t_start + (i - 1) as f64 * h;
        z = rk4_step(rhs, t_prev, &z, h);
        let t = cfg.t_start + i as f64 * h;
        if !(z[0] >= 0.0 && z[1] >= 0.0 && z[0].is_finite() && z[1].is_finite()) {
            return Err(Error::Diverged { time: t });
        }
        times.push(t);
        states.push(OdeState::from_array(z));
    }
    Ok(Trajectory { times, states })
}

/// Grid stride matching `delta_t` on a trajectory with step `h`.
pub(crate) fn stride_for(delta_t: f64, h: f64) -> Result<usize> {
    let misaligned = || Error::MisalignedObservation { delta_t, step: h };
    if !(delta_t > 0.0) || !(h > 0.0) {
        return Err(misaligned());
    }
    let ratio = delta_t / h;
    let stride = ratio.round();
    if stride < 1.0 || (ratio - stride).abs() > 1e-9 {
        return Err(misaligned());
    }
    Ok(stride as usize)
}

/// States at `t_start, t_start + delta_t, ...` up to the end of the
/// trajectory. `delta_t` must be a multiple of the integration step.
pub fn observe(traj: &Trajectory, delta_t: f64) -> Result<TimeSeries> {
    let h = traj.step_size();
    let stride = if traj.len() == 1 {
        1
    } else {
        stride_for(delta_t, h)?
    };
    let idx: Vec<usize> = (0..traj.len()).step_by(stride).collect();
    Ok(TimeSeries {
        times: idx.iter().map(|&i| traj.times[i]).collect(),
        observations: idx.iter().map(|&i| traj.states[i]).collect(),
    })
}

/// Conserved quantity `gamma_lv x - delta_lv ln x + beta y - alpha ln y`.
pub fn first_integral(z: OdeState, p: &LvParams) -> f64 {
    p.gamma_lv * z.x - p.delta_lv * z.x.ln() + p.beta * z.y - p.alpha * z.y.ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn theta_true() -> LvParams {
        LvParams::new(1.0, 0.1, 0.1, 1.0)
    }

    #[test]
    fn derivative_examples() {
        let p = theta_true();
        assert_eq!(lv_derivative(OdeState::new(10.0, 10.0), &p), (0.0, 0.0));
        let (dx, dy) = lv_derivative(OdeState::new(1.0, 1.0), &p);
        assert!((dx - 0.9).abs() < 1e-15 && (dy + 0.9).abs() < 1e-15);
        for y in [0.0, 1.0, 50.0] {
            assert_eq!(lv_derivative(OdeState::new(0.0, y), &p).0, 0.0);
        }
    }

    #[test]
    fn single_step_exponential() {
        let next = rk4_step(|_, z: &[f64; 1]| [z[0]], 0.0, &[1.0], 0.1);
        assert!((next[0] - 0.1f64.exp()).abs() < 1e-7);
        assert!((next[0] - 1.105_170_833_333_333_3).abs() < 1e-15);
    }

    #[test]
    fn equilibrium_is_fixed() {
        let traj = integrate_rk4(
            &theta_true(),
            OdeState::new(10.0, 10.0),
            &IntegratorConfig::default(),
        )
        .unwrap();
        assert_eq!(traj.len(), 1001);
        for s in &traj.states {
            assert!((s.x - 10.0).abs() < 1e-12 && (s.y - 10.0).abs() < 1e-12);
        }
    }

    #[test]
    fn step_halving_is_self_consistent() {
        let z0 = OdeState::new(1.0, 2.0);
        let a = integrate_rk4(&theta_true(), z0, &IntegratorConfig::new(0.01, 0.0, 10.0)).unwrap();
        let b = integrate_rk4(&theta_true(), z0, &IntegratorConfig::new(0.005, 0.0, 10.0)).unwrap();
        let (ea, eb) = (a.states.last().unwrap(), b.states.last().unwrap());
        assert!((ea.x - eb.x).abs().max((ea.y - eb.y).abs()) < 1e-6);
        assert!((b.times.last().unwrap() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn divergence_reports_time() {
        // Strong growth without predation overflows.
        let p = LvParams::new(2.0, 0.0, 2.0, 0.0);
        let err =
            integrate_rk4(&p, OdeState::new(1.0, 2.0), &IntegratorConfig::default()).unwrap_err();
        match err {
            Error::Diverged { time } => assert!(time > 0.0 && time <= 10.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn misaligned_grid_rejected() {
        assert!(IntegratorConfig::new(0.3, 0.0, 10.0).steps().is_err());
        assert!(IntegratorConfig::new(0.01, 1.0, 1.0).steps().is_err());
        assert_eq!(IntegratorConfig::new(0.1, 0.0, 10.0).steps().unwrap(), 100);
    }

    #[test]
    fn observation_grid() {
        let traj = integrate_rk4(
            &theta_true(),
            OdeState::new(1.0, 2.0),
            &IntegratorConfig::default(),
        )
        .unwrap();
        let obs = observe(&traj, 1.0).unwrap();
        assert_eq!(obs.len(), 11);
        for (k, t) in obs.times.iter().enumerate() {
            assert!((t - k as f64).abs() < 1e-9);
        }
        assert_eq!(observe(&traj, 0.01).unwrap().len(), traj.len());
        assert!(matches!(
            observe(&traj, 0.015),
            Err(Error::MisalignedObservation { .. })
        ));
    }

    #[test]
    fn equilibrium_observations_constant() {
        let traj = integrate_rk4(
            &theta_true(),
            OdeState::new(10.0, 10.0),
            &IntegratorConfig::default(),
        )
        .unwrap();
        let obs = observe(&traj, 1.0).unwrap();
        assert_eq!(obs.len(), 11);
        assert!(obs
            .observations
            .iter()
            .all(|o| (o.x - 10.0).abs() < 1e-12 && (o.y - 10.0).abs() < 1e-12));
    }

    #[test]
    fn time_series_validation() {
        let ok = TimeSeries {
            times: vec![0.0, 1.0],
            observations: vec![OdeState::new(1.0, 1.0), OdeState::new(2.0, 0.5)],
        };
        assert!(ok.validate().is_ok());
        let mut bad = ok.clone();
        bad.observations[1].y = 0.0;
        assert!(bad.validate().is_err());
        let mut bad = ok;
        bad.times[1] = 0.0;
        assert!(bad.validate().is_err());
    }
}
