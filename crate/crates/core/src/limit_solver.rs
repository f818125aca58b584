//! Exact-in-time solver of the anomalous diffusion limit equation
//! ∂_t ρ̂ + κ |k|^α ρ̂ = 0, used as the ε → 0 reference for every scheme.
//!
//! κ is injected by the caller (computed by [`crate::quadrature::kappa`] on
//! the configured w-grid), not recomputed internally: the AP schemes converge
//! to the *discrete* κ of their shared quadrature, and using the same value
//! here keeps the reference consistent with that limit.

use crate::model::ModelCase;
use crate::spectral::SpectralDensity;
use crate::ConfigError;

/// Evolve ρ̂ exactly: per mode, ρ̂(t, k) = e^{−κ|k|^α t} ρ̂₀(k).
pub fn evolve(
    rho0: &SpectralDensity,
    case: &ModelCase,
    kappa: f64,
    t: f64,
) -> Result<SpectralDensity, ConfigError> {
    if t < 0.0 {
        return Err(ConfigError::InvalidParameter(format!(
            "evolution time must be nonnegative, got {t}"
        )));
    }
    let n = rho0.len();
    let alpha = case.alpha();
    let modes = rho0
        .modes
        .iter()
        .enumerate()
        .map(|(j, &amp)| {
            let k = SpectralDensity::wavenumber(n, j);
            amp * (-kappa * k.abs().powf(alpha) * t).exp()
        })
        .collect();
    Ok(SpectralDensity { modes })
}
