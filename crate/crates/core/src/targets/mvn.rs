use std::f64::consts::PI;

use crate::{Error, Result, TargetDensity};

/// Zero-mean bivariate normal with marginal sds `sigma1`, `sigma2` and
/// correlation `rho`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MvnTarget {
    pub sigma1: f64,
    pub sigma2: f64,
    pub rho: f64,
}

impl MvnTarget {
    pub fn new(sigma1: f64, sigma2: f64, rho: f64) -> Result<Self> {
        if !(sigma1 > 0.0 && sigma2 > 0.0 && sigma1.is_finite() && sigma2.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "marginal sds must be positive, got {sigma1}, {sigma2}"
            )));
        }
        if !(rho > -1.0 && rho < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "rho must lie in (-1, 1), got {rho}"
            )));
        }
        Ok(Self {
            sigma1,
            sigma2,
            rho,
        })
    }

    /// Row-major 2x2 covariance.
    pub fn covariance(&self) -> [[f64; 2]; 2] {
        let c = self.rho * self.sigma1 * self.sigma2;
        [
            [self.sigma1 * self.sigma1, c],
            [c, self.sigma2 * self.sigma2],
        ]
    }

    pub fn log_density_at(&self, x: f64, y: f64) -> f64 {
        let one_minus_r2 = 1.0 - self.rho * self.rho;
        let (u, v) = (x / self.sigma1, y / self.sigma2);
        let quad = (u * u - 2.0 * self.rho * u * v + v * v) / one_minus_r2;
        let log_det = 2.0 * (self.sigma1 * self.sigma2).ln() + one_minus_r2.ln();
        -(2.0 * PI).ln() - 0.5 * log_det - 0.5 * quad
    }
}

impl TargetDensity for MvnTarget {
    fn dimension(&self) -> usize {
        2
    }

    fn log_density(&self, theta: &[f64]) -> f64 {
        debug_assert_eq!(theta.len(), 2);
        self.log_density_at(theta[0], theta[1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn correlated_target() -> MvnTarget {
        MvnTarget::new(1.0, 1.0, 0.99).unwrap()
    }

    /// Quadratic form through an explicitly inverted covariance.
    fn direct(t: &MvnTarget, x: f64, y: f64) -> f64 {
        let [[a, b], [c, d]] = t.covariance();
        let det = a * d - b * c;
        let inv = [[d / det, -b / det], [-c / det, a / det]];
        let q = x * (inv[0][0] * x + inv[0][1] * y) + y * (inv[1][0] * x + inv[1][1] * y);
        -(2.0 * PI).ln() - 0.5 * det.ln() - 0.5 * q
    }

    #[test]
    fn value_at_origin() {
        let expected = -(2.0 * PI).ln() - 0.5 * (1.0f64 - 0.99 * 0.99).ln();
        let lp = correlated_target().log_density(&[0.0, 0.0]);
        assert!((lp - expected).abs() < 1e-14);
        assert!((lp - 0.120_640_707).abs() < 1e-9);
    }

    #[test]
    fn uncorrelated_is_product_of_normals() {
        let t = MvnTarget::new(1.0, 1.0, 0.0).unwrap();
        let n = |x: f64| -0.5 * (2.0 * PI).ln() - 0.5 * x * x;
        for (x, y) in [(0.3, -1.2), (2.0, 0.0), (-0.7, 0.7)] {
            assert!((t.log_density(&[x, y]) - (n(x) + n(y))).abs() < 1e-14);
        }
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(MvnTarget::new(1.0, 1.0, 1.0).is_err());
        assert!(MvnTarget::new(0.0, 1.0, 0.5).is_err());
        assert!(MvnTarget::new(1.0, -1.0, 0.5).is_err());
    }

    proptest! {
        #[test]
        fn even_function(x in -10.0..10.0f64, y in -10.0..10.0f64) {
            let t = correlated_target();
            prop_assert_eq!(t.log_density(&[x, y]), t.log_density(&[-x, -y]));
        }

        #[test]
        fn agrees_with_explicit_inverse(
            x in -5.0..5.0f64,
            y in -5.0..5.0f64,
            s1 in 0.2..3.0f64,
            s2 in 0.2..3.0f64,
            rho in -0.95..0.95f64,
        ) {
            let t = MvnTarget::new(s1, s2, rho).unwrap();
            let a = t.log_density(&[x, y]);
            let b = direct(&t, x, y);
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()), "{} vs {}", a, b);
        }
    }
}
