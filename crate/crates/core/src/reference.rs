//! Brute-force reference integration of the kinetic equation.
//!
//! Per Fourier mode the kinetic equation is a linear ODE system over the
//! velocity nodes,
//!
//! ```text
//! ∂_t f̂(t, k, v) = −(1/ε^α) [ ε v σ(k) f̂ + ν(v) (f̂ − M ρ̂_ν) ],
//! ```
//!
//! which this module integrates with explicit Euler substeps much finer than
//! the scheme step Δt. The result is the "ground truth" that the structured
//! schemes are measured against at ε = O(1); it makes no use of any of their
//! machinery beyond the shared grids.
//!
//! The transport symbol σ(k) is spectral (i k) by default; the upwind symbol
//! σ|v|/v + iτ with σ = (1 − cos kΔx)/Δx, τ = sin(kΔx)/Δx is available for
//! studying the finite-difference variant.

use num_complex::Complex64;

use crate::model::{InitialData, ModelCase};
use crate::quadrature::VelocityGrid;
use crate::spectral::{self, SpectralDensity};
use crate::NumericsError;

/// Spatial transport symbol used by the reference integrator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransportSymbol {
    /// Exact per-mode symbol i k v.
    Spectral,
    /// First-order upwind symbol on the N_x grid.
    Upwind,
}

/// Densities produced by a brute-force run.
pub struct BruteResult {
    /// ρ(T, x) = ⟨f⟩ on the x-grid.
    pub rho: Vec<f64>,
    /// ρ_ν(T, x) = ⟨νf⟩/⟨νM⟩ on the x-grid.
    pub rho_nu: Vec<f64>,
    /// ρ(T, x)/⟨M⟩_h: the macro density in the f = rM + g normalization.
    pub rho_over_m: Vec<f64>,
}

/// Integrate the kinetic equation from the built-in initial data to `t_final`
/// with `substeps` explicit Euler substeps per Δt.
#[allow(clippy::too_many_arguments)]
pub fn brute_run(
    init: &InitialData,
    case: &ModelCase,
    eps: f64,
    dt: f64,
    t_final: f64,
    n_x: usize,
    vgrid: &VelocityGrid,
    symbol: TransportSymbol,
    substeps: usize,
) -> Result<BruteResult, NumericsError> {
    let alpha = case.alpha();
    let ea = eps.powf(alpha);
    let n_steps = (t_final / dt).round() as usize;
    let dt_sub = dt / substeps as f64;
    let total_steps = n_steps * substeps;
    let dx = 2.0 / n_x as f64;

    let m_nodes: Vec<f64> = vgrid.nodes.iter().map(|&v| case.equilibrium(v)).collect();
    let nu_nodes: Vec<f64> = vgrid
        .nodes
        .iter()
        .map(|&v| case.collision_frequency(v))
        .collect();
    let nu_m_mass = vgrid.dv
        * m_nodes
            .iter()
            .zip(&nu_nodes)
            .map(|(m, nu)| m * nu)
            .sum::<f64>();

    let xs = spectral::x_grid(n_x);
    let samples: Vec<f64> = xs.iter().map(|&x| init.rho0(x)).collect();
    let rho0_hat = SpectralDensity::from_samples(&samples);

    let mut rho_modes = vec![Complex64::new(0.0, 0.0); n_x];
    let mut rho_nu_modes = vec![Complex64::new(0.0, 0.0); n_x];

    for j in 0..n_x {
        let amp = rho0_hat.modes[j];
        if amp.norm() < 1e-14 {
            continue;
        }
        let k = SpectralDensity::wavenumber(n_x, j);
        // transport multiplier per velocity node
        let transport: Vec<Complex64> = vgrid
            .nodes
            .iter()
            .map(|&v| match symbol {
                TransportSymbol::Spectral => Complex64::new(0.0, eps * k * v),
                TransportSymbol::Upwind => {
                    let sigma = (1.0 - (k * dx).cos()) / dx;
                    let tau = (k * dx).sin() / dx;
                    Complex64::new(eps * sigma * v.abs(), eps * tau * v)
                }
            })
            .collect();

        let mut f: Vec<Complex64> = m_nodes.iter().map(|&m| amp * m).collect();
        for step in 0..total_steps {
            let mut nu_f = Complex64::new(0.0, 0.0);
            for (iv, fv) in f.iter().enumerate() {
                nu_f += nu_nodes[iv] * fv;
            }
            let rho_nu = vgrid.dv * nu_f / nu_m_mass;
            for (iv, fv) in f.iter_mut().enumerate() {
                let rhs = transport[iv] * *fv + nu_nodes[iv] * (*fv - m_nodes[iv] * rho_nu);
                *fv -= (dt_sub / ea) * rhs;
            }
            if !f[0].re.is_finite() {
                return Err(NumericsError::NonFinite {
                    step,
                    context: format!("brute-force integration diverged at mode k = {k}"),
                });
            }
        }

        let mut sum = Complex64::new(0.0, 0.0);
        let mut nu_sum = Complex64::new(0.0, 0.0);
        for (iv, fv) in f.iter().enumerate() {
            sum += fv;
            nu_sum += nu_nodes[iv] * fv;
        }
        rho_modes[j] = vgrid.dv * sum;
        rho_nu_modes[j] = vgrid.dv * nu_sum / nu_m_mass;
    }

    spectral::inverse(&mut rho_modes);
    spectral::inverse(&mut rho_nu_modes);
    let m_mass = vgrid.dv * m_nodes.iter().sum::<f64>();
    let rho: Vec<f64> = rho_modes.into_iter().map(|z| z.re).collect();
    let rho_over_m = rho.iter().map(|r| r / m_mass).collect();
    Ok(BruteResult {
        rho,
        rho_nu: rho_nu_modes.into_iter().map(|z| z.re).collect(),
        rho_over_m,
    })
}
