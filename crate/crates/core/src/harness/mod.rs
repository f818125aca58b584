//! Experiment harness: run configuration, single runs, parameter sweeps, and
//! CSV emission shared by the command-line front end and the test suite.
//!
//! A [`RunConfig`] pins every physical and numerical parameter with defaults
//! chosen so that `RunConfig::default()` reproduces the standard benchmark
//! setup (heavy-tail case, N_x = 64, v_max = 5, N_v = 200, Δt = 10⁻³,
//! T = 0.1). Configs layer: defaults, then an optional flat key=value file,
//! then individual overrides — later layers win.

mod config;
mod csv;
mod sweep;

pub use config::{CaseKind, RunConfig, Scheme};
pub use csv::{emit_csv, emit_csv_to, format_value};
pub use sweep::{
    convergence_order, rel_linf, sweep_dt, sweep_eps, SweepDtRow, SweepEpsRow,
};

use crate::limit_solver;
use crate::micromacro::{
    implicit_run, ImplicitContext, MicroMacroContext, SpatialDerivative,
};
use crate::quadrature::{kappa, SubstitutedGrid, VelocityGrid};
use crate::spectral::{self, SpectralDensity};
use crate::{duhamel, micromacro, ConfigError, InitialData, NumericsError};

/// Everything that can go wrong in a harness-driven run; the CLI maps the
/// two variants to distinct exit codes.
#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Final-time densities of a single run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    /// x-grid points.
    pub x: Vec<f64>,
    /// Macro density at T, normalized so the limit value of its mean is 1
    /// (the micro–macro r, ρ/⟨M⟩_h for the implicit scheme, ρ_ν for the
    /// Duhamel scheme — all three converge to the limit density as ε → 0).
    pub rho: Vec<f64>,
    /// ρ_ν at T where the scheme computes it separately.
    pub rho_nu: Option<Vec<f64>>,
}

/// Run one scheme to T with the given configuration.
pub fn run_single(cfg: &RunConfig) -> Result<RunOutput, RunError> {
    cfg.validate()?;
    let case = cfg.model_case()?;
    let vgrid = VelocityGrid::new(cfg.v_max, cfg.n_v)?;
    let wgrid = SubstitutedGrid::new(cfg.w_max, cfg.n_w)?;
    let x = spectral::x_grid(cfg.n_x);
    let init = InitialData::WellPrepared;

    match cfg.scheme {
        Scheme::Limit => {
            let kap = kappa(&case, &wgrid);
            let samples: Vec<f64> = x.iter().map(|&xi| init.rho0(xi)).collect();
            let rho0_hat = SpectralDensity::from_samples(&samples);
            let rho = limit_solver::evolve(&rho0_hat, &case, kap, cfg.t_final)?.to_samples();
            Ok(RunOutput { x, rho, rho_nu: None })
        }
        Scheme::MicroMacro => {
            let ctx = MicroMacroContext::new(
                case,
                cfg.eps,
                cfg.dt,
                cfg.n_x,
                vgrid,
                &wgrid,
                SpatialDerivative::for_case(&cfg.model_case()?),
                cfg.macro_closure,
            );
            if cfg.macro_closure == crate::micromacro::MacroClosure::Explicit {
                let i_max = ctx.i_modes.iter().cloned().fold(0.0f64, f64::max);
                if cfg.dt * i_max > 2.0 {
                    eprintln!(
                        "warning: explicit macro closure outside its stability region \
                         (dt * max I = {:.3e} > 2); expect blow-up",
                        cfg.dt * i_max
                    );
                }
            }
            let rho = micromacro::run(&init, &ctx, cfg.t_final)?;
            Ok(RunOutput { x, rho, rho_nu: None })
        }
        Scheme::Implicit => {
            let m_mass = vgrid.dv
                * vgrid
                    .nodes
                    .iter()
                    .map(|&v| case.equilibrium(v))
                    .sum::<f64>();
            let ctx = ImplicitContext::new(case, cfg.eps, cfg.dt, cfg.n_x, vgrid, &wgrid);
            let (rho_raw, rho_nu) = implicit_run(&init, &ctx, cfg.t_final)?;
            let rho = rho_raw.iter().map(|r| r / m_mass).collect();
            Ok(RunOutput {
                x,
                rho,
                rho_nu: Some(rho_nu),
            })
        }
        Scheme::Duhamel => {
            let ctx = duhamel::DuhamelContext::new(case, cfg.eps, cfg.dt, cfg.n_x, vgrid, wgrid);
            let rho_nu = duhamel::run(&init, &ctx, cfg.t_final)?;
            Ok(RunOutput {
                x,
                rho: rho_nu.clone(),
                rho_nu: Some(rho_nu),
            })
        }
    }
}
