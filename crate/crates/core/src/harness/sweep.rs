//! Parameter sweeps: ε-robustness against the limit equation and Δt
//! self-convergence with a refined reference.

use std::time::Instant;

use crate::harness::{run_single, RunConfig, RunError};
use crate::limit_solver;
use crate::quadrature::{kappa, SubstitutedGrid};
use crate::spectral::{self, SpectralDensity};
use crate::InitialData;

/// Relative L∞ distance max|a − b| / max|b|.
pub fn rel_linf(a: &[f64], b: &[f64]) -> f64 {
    let num = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0f64, f64::max);
    let den = b.iter().map(|y| y.abs()).fold(0.0f64, f64::max);
    num / den
}

/// One row of an ε sweep.
#[derive(Debug, Clone)]
pub struct SweepEpsRow {
    pub eps: f64,
    pub error_linf: f64,
    pub runtime_s: f64,
}

/// Run the configured scheme for each ε and measure the relative L∞ distance
/// of its final density from the exact limit-equation solution.
pub fn sweep_eps(cfg: &RunConfig, eps_values: &[f64]) -> Result<Vec<SweepEpsRow>, RunError> {
    cfg.validate()?;
    let case = cfg.model_case()?;
    let wgrid = SubstitutedGrid::new(cfg.w_max, cfg.n_w)?;
    let kap = kappa(&case, &wgrid);
    let xs = spectral::x_grid(cfg.n_x);
    let samples: Vec<f64> = xs.iter().map(|&x| InitialData::WellPrepared.rho0(x)).collect();
    let rho0_hat = SpectralDensity::from_samples(&samples);
    let limit = limit_solver::evolve(&rho0_hat, &case, kap, cfg.t_final)?.to_samples();

    let mut rows = Vec::with_capacity(eps_values.len());
    for &eps in eps_values {
        let mut run_cfg = cfg.clone();
        run_cfg.eps = eps;
        let start = Instant::now();
        let out = run_single(&run_cfg)?;
        let runtime_s = start.elapsed().as_secs_f64();
        rows.push(SweepEpsRow {
            eps,
            error_linf: rel_linf(&out.rho, &limit),
            runtime_s,
        });
    }
    Ok(rows)
}

/// One row of a Δt sweep.
#[derive(Debug, Clone)]
pub struct SweepDtRow {
    pub dt: f64,
    pub error_linf: f64,
    pub runtime_s: f64,
}

/// Self-convergence in Δt: each run is compared against the same scheme at
/// the reference step min(Δt)/8, all other parameters fixed.
pub fn sweep_dt(cfg: &RunConfig, dt_values: &[f64]) -> Result<Vec<SweepDtRow>, RunError> {
    cfg.validate()?;
    if dt_values.is_empty() {
        return Ok(Vec::new());
    }
    let dt_min = dt_values.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut ref_cfg = cfg.clone();
    ref_cfg.dt = dt_min / 8.0;
    let reference = run_single(&ref_cfg)?;

    let mut rows = Vec::with_capacity(dt_values.len());
    for &dt in dt_values {
        let mut run_cfg = cfg.clone();
        run_cfg.dt = dt;
        let start = Instant::now();
        let out = run_single(&run_cfg)?;
        let runtime_s = start.elapsed().as_secs_f64();
        rows.push(SweepDtRow {
            dt,
            error_linf: rel_linf(&out.rho, &reference.rho),
            runtime_s,
        });
    }
    Ok(rows)
}

/// Least-squares slope of log(error) vs log(dt): the observed convergence
/// order of a Δt sweep.
pub fn convergence_order(rows: &[SweepDtRow]) -> f64 {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.error_linf > 0.0)
        .map(|r| (r.dt.ln(), r.error_linf.ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}
