//! Concrete targets: the correlated bivariate normal and the Lotka-Volterra
//! posterior, plus synthetic-data generation for the latter.

mod gamma;
mod lotka_volterra;
mod mvn;

pub use gamma::gamma_log_pdf;
pub use lotka_volterra::{generate_synthetic_data, LvPosterior, MIN_PREDICTED_SHAPE};
pub use mvn::MvnTarget;

pub use crate::ode::TimeSeries;
