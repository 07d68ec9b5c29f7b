use super::gamma_log_pdf;
use crate::ode::{
    integrate_rk4, observe, stride_for, IntegratorConfig, LvParams, OdeState, TimeSeries,
};
use crate::{Error, Result, RngStream, TargetDensity};

/// Predicted states below this are treated as zero likelihood instead of
/// evaluating an ill-conditioned `ln Gamma`.
pub const MIN_PREDICTED_SHAPE: f64 = 1e-8;

/// Posterior over `[alpha, beta, gamma_lv, delta_lv]` given observed
/// predator-prey counts.
///
/// Each observation is gamma distributed with shape equal to the predicted
/// state and scale `gamma_scale` (1 by default), so its mean is the
/// prediction. The prior is uniform on `[prior_low, prior_high]^4`; its
/// normalizing constant is dropped.
#[derive(Debug, Clone)]
pub struct LvPosterior {
    data: TimeSeries,
    z0: OdeState,
    prior_low: f64,
    prior_high: f64,
    integrator: IntegratorConfig,
    gamma_scale: f64,
    /// Trajectory node matching each observation time.
    node_index: Vec<usize>,
}

impl LvPosterior {
    pub fn new(
        data: TimeSeries,
        z0: OdeState,
        prior_low: f64,
        prior_high: f64,
        integrator: IntegratorConfig,
    ) -> Result<Self> {
        data.validate()?;
        if !(prior_low < prior_high) || !prior_low.is_finite() || !prior_high.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "prior bounds must satisfy low < high, got [{prior_low}, {prior_high}]"
            )));
        }
        let steps = integrator.steps()?;
        let h = integrator.step_size;
        let mut node_index = Vec::with_capacity(data.len());
        for &t in &data.times {
            let offset = t - integrator.t_start;
            let idx = if offset == 0.0 {
                0
            } else {
                stride_for(offset, h)?
            };
            if offset < 0.0 || idx > steps {
                return Err(Error::InvalidConfig(format!(
                    "observation time {t} outside integration window [{}, {}]",
                    integrator.t_start, integrator.t_end
                )));
            }
            node_index.push(idx);
        }
        Ok(Self {
            data,
            z0,
            prior_low,
            prior_high,
            integrator,
            gamma_scale: 1.0,
            node_index,
        })
    }

    pub fn data(&self) -> &TimeSeries {
        &self.data
    }

    pub fn z0(&self) -> OdeState {
        self.z0
    }

    pub fn integrator(&self) -> &IntegratorConfig {
        &self.integrator
    }

    pub fn prior_bounds(&self) -> (f64, f64) {
        (self.prior_low, self.prior_high)
    }

    pub fn in_prior(&self, theta: &[f64]) -> bool {
        theta
            .iter()
            .all(|&v| v >= self.prior_low && v <= self.prior_high)
    }

    fn log_likelihood(&self, predicted: &[OdeState]) -> f64 {
        let mut total = 0.0;
        for (obs, &i) in self.data.observations.iter().zip(&self.node_index) {
            let pred = predicted[i];
            if pred.x < MIN_PREDICTED_SHAPE || pred.y < MIN_PREDICTED_SHAPE {
                return f64::NEG_INFINITY;
            }
            total += gamma_log_pdf(obs.x, pred.x, self.gamma_scale)
                + gamma_log_pdf(obs.y, pred.y, self.gamma_scale);
        }
        total
    }
}

impl TargetDensity for LvPosterior {
    fn dimension(&self) -> usize {
        4
    }

    fn log_density(&self, theta: &[f64]) -> f64 {
        if theta.len() != 4 || !self.in_prior(theta) {
            return f64::NEG_INFINITY;
        }
        let params = LvParams::new(theta[0], theta[1], theta[2], theta[3]);
        match integrate_rk4(&params, self.z0, &self.integrator) {
            Ok(traj) => self.log_likelihood(&traj.states),
            Err(_) => f64::NEG_INFINITY,
        }
    }
}

/// Integrates the system at `p` and observes it every `delta_t`. With
/// `noise`, each observation is replaced by a gamma draw with shape equal to
/// the prediction and unit scale.
pub fn generate_synthetic_data(
    p: &LvParams,
    z0: OdeState,
    cfg: &IntegratorConfig,
    delta_t: f64,
    noise: bool,
    rng: &mut RngStream,
) -> Result<TimeSeries> {
    p.validate()?;
    let traj = integrate_rk4(p, z0, cfg)?;
    let mut series = observe(&traj, delta_t)?;
    if noise {
        for obs in &mut series.observations {
            obs.x = rng.gamma(obs.x, 1.0)?;
            obs.y = rng.gamma(obs.y, 1.0)?;
        }
    }
    Ok(series)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn theta_true() -> LvParams {
        LvParams::new(1.0, 0.1, 0.1, 1.0)
    }

    fn posterior_for(z0: OdeState, noise: bool, seed: u64) -> LvPosterior {
        let cfg = IntegratorConfig::default();
        let mut rng = RngStream::new(seed);
        let data = generate_synthetic_data(&theta_true(), z0, &cfg, 1.0, noise, &mut rng).unwrap();
        LvPosterior::new(data, z0, 0.0, 2.0, cfg).unwrap()
    }

    #[test]
    fn eleven_observations() {
        let mut rng = RngStream::new(0);
        let data = generate_synthetic_data(
            &theta_true(),
            OdeState::new(1.0, 2.0),
            &IntegratorConfig::default(),
            1.0,
            false,
            &mut rng,
        )
        .unwrap();
        assert_eq!(data.len(), 11);
        assert_eq!(data.times[10], 10.0);
    }

    #[test]
    fn equilibrium_data_constant() {
        let post = posterior_for(OdeState::new(10.0, 10.0), false, 0);
        assert!(post
            .data()
            .observations
            .iter()
            .all(|o| (o.x - 10.0).abs() < 1e-12 && (o.y - 10.0).abs() < 1e-12));
    }

    #[test]
    fn noisy_data_reproducible() {
        let a = posterior_for(OdeState::new(1.0, 2.0), true, 17);
        let b = posterior_for(OdeState::new(1.0, 2.0), true, 17);
        let c = posterior_for(OdeState::new(1.0, 2.0), true, 18);
        assert_eq!(a.data(), b.data());
        assert_ne!(a.data(), c.data());
        let clean = posterior_for(OdeState::new(1.0, 2.0), false, 17);
        assert_ne!(a.data(), clean.data());
    }

    #[test]
    fn outside_prior_is_neg_inf() {
        let post = posterior_for(OdeState::new(1.0, 2.0), false, 0);
        for theta in [
            [2.1, 0.1, 0.1, 1.0],
            [1.0, -0.01, 0.1, 1.0],
            [1.0, 0.1, 0.1, 3.0],
        ] {
            assert_eq!(post.log_density(&theta), f64::NEG_INFINITY);
        }
        assert!(post.log_density(&theta_true().to_array()).is_finite());
    }

    #[test]
    fn true_parameters_beat_random_prior_draws() {
        let post = posterior_for(OdeState::new(1.0, 2.0), false, 0);
        let at_truth = post.log_density(&theta_true().to_array());
        let mut rng = RngStream::new(4242);
        for _ in 0..1_000 {
            let theta: Vec<f64> = (0..4).map(|_| rng.uniform_range(0.0, 2.0)).collect();
            let lp = post.log_density(&theta);
            assert!(at_truth >= lp, "{theta:?}: {lp} > {at_truth}");
        }
    }

    #[test]
    fn perturbing_alpha_lowers_fit() {
        let post = posterior_for(OdeState::new(1.0, 2.0), false, 0);
        let at_truth = post.log_density(&[1.0, 0.1, 0.1, 1.0]);
        assert!(at_truth > post.log_density(&[1.5, 0.1, 0.1, 1.0]));
    }

    #[test]
    fn diverging_parameters_are_neg_inf() {
        let post = posterior_for(OdeState::new(1.0, 2.0), false, 0);
        assert_eq!(post.log_density(&[2.0, 0.0, 2.0, 0.0]), f64::NEG_INFINITY);
    }

    #[test]
    fn extinct_prediction_is_neg_inf() {
        // Heavy predation drives prey to (near) zero.
        let post = posterior_for(OdeState::new(1.0, 2.0), false, 0);
        let lp = post.log_density(&[0.0, 2.0, 0.0, 0.0]);
        assert_eq!(lp, f64::NEG_INFINITY);
    }

    #[test]
    fn rejects_bad_construction() {
        let cfg = IntegratorConfig::default();
        let mut rng = RngStream::new(0);
        let data = generate_synthetic_data(
            &theta_true(),
            OdeState::new(1.0, 2.0),
            &cfg,
            1.0,
            false,
            &mut rng,
        )
        .unwrap();
        assert!(LvPosterior::new(data.clone(), OdeState::new(1.0, 2.0), 2.0, 0.0, cfg).is_err());
        let short = IntegratorConfig::new(0.01, 0.0, 5.0);
        assert!(LvPosterior::new(data, OdeState::new(1.0, 2.0), 0.0, 2.0, short).is_err());
    }
}
