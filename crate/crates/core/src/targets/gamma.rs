use statrs::function::gamma::ln_gamma;

/// Log-density of the gamma distribution with the given shape and scale:
/// `(shape - 1) ln x - x / scale - shape ln scale - ln Gamma(shape)`.
///
/// Returns `-inf` outside the support or for non-positive parameters.
pub fn gamma_log_pdf(x: f64, shape: f64, scale: f64) -> f64 {
    if !(x > 0.0 && shape > 0.0 && scale > 0.0) || !x.is_finite() || !shape.is_finite() {
        return f64::NEG_INFINITY;
    }
    (shape - 1.0) * x.ln() - x / scale - shape * scale.ln() - ln_gamma(shape)
}
