//! Command-line front end for the kinetic solver suite.
//!
//! Three subcommands:
//!
//! - `run`       — integrate one scheme to T and emit the final density as CSV,
//! - `sweep-eps` — error against the exact limit-equation solution per ε,
//! - `sweep-dt`  — Δt self-convergence against a Δt_min/8 reference run.
//!
//! Configuration layers, later wins: built-in defaults, then `--config FILE`
//! (flat `key = value` lines, `#` comments), then individual flags.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use apkinetics::harness::{
    self, emit_csv_to, sweep_dt, sweep_eps, RunConfig, RunError,
};

#[derive(Parser)]
#[command(name = "apkinetics", version, about = "1D solvers for linear kinetic equations in the anomalous diffusion limit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scheme to T and emit x,rho[,rho_nu] as CSV.
    Run(CommonArgs),
    /// Sweep ε and report the relative L∞ error against the limit equation.
    SweepEps {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated ε values.
        #[arg(long, value_delimiter = ',', default_value = "1e-1,1e-2,1e-3,1e-4,1e-5")]
        eps_values: Vec<f64>,
    },
    /// Sweep Δt and report the self-convergence error against Δt_min/8.
    SweepDt {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated Δt values.
        #[arg(long, value_delimiter = ',', default_value = "1e-2,5e-3,2.5e-3,1.25e-3")]
        dt_values: Vec<f64>,
    },
}

/// Flags shared by every subcommand; each one overrides the config file.
#[derive(Args)]
struct CommonArgs {
    /// Flat key=value config file applied over the defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Model case: heavy-tail | degenerate.
    #[arg(long)]
    case: Option<String>,
    /// Equilibrium tail / degeneracy exponent β.
    #[arg(long)]
    beta: Option<f64>,
    /// Collision amplitude ν₀ (degenerate case).
    #[arg(long)]
    nu0: Option<f64>,
    /// Scaling parameter ε.
    #[arg(long)]
    eps: Option<f64>,
    /// Time step Δt.
    #[arg(long)]
    dt: Option<f64>,
    /// Final time T.
    #[arg(long)]
    t_final: Option<f64>,
    /// Number of spatial grid points (power of two).
    #[arg(long)]
    n_x: Option<usize>,
    /// Velocity grid half-width.
    #[arg(long)]
    v_max: Option<f64>,
    /// Number of velocity nodes (even).
    #[arg(long)]
    n_v: Option<usize>,
    /// Substituted-variable grid half-width.
    #[arg(long)]
    w_max: Option<f64>,
    /// Number of substituted-variable nodes (even).
    #[arg(long)]
    n_w: Option<usize>,
    /// Scheme: micromacro | duhamel | implicit | limit.
    #[arg(long)]
    scheme: Option<String>,
    /// Macro closure: implicit | explicit.
    #[arg(long)]
    macro_closure: Option<String>,
    /// Output CSV path (stdout when absent).
    #[arg(long)]
    output: Option<PathBuf>,
}

impl CommonArgs {
    /// defaults < config file < flags
    fn build_config(&self) -> Result<RunConfig, apkinetics::ConfigError> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        if let Some(v) = &self.case {
            cfg.apply_kv("case", v)?;
        }
        for (key, value) in [
            ("beta", self.beta),
            ("nu0", self.nu0),
            ("eps", self.eps),
            ("dt", self.dt),
            ("t_final", self.t_final),
            ("v_max", self.v_max),
            ("w_max", self.w_max),
        ] {
            if let Some(v) = value {
                cfg.apply_kv(key, &v.to_string())?;
            }
        }
        for (key, value) in [("n_x", self.n_x), ("n_v", self.n_v), ("n_w", self.n_w)] {
            if let Some(v) = value {
                cfg.apply_kv(key, &v.to_string())?;
            }
        }
        if let Some(v) = &self.scheme {
            cfg.apply_kv("scheme", v)?;
        }
        if let Some(v) = &self.macro_closure {
            cfg.apply_kv("macro_closure", v)?;
        }
        if let Some(v) = &self.output {
            cfg.output = Some(v.clone());
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn execute(command: &Command) -> Result<(), RunError> {
    match command {
        Command::Run(common) => {
            let cfg = common.build_config()?;
            let out = harness::run_single(&cfg)?;
            let (header, rows): (&str, Vec<Vec<f64>>) = match &out.rho_nu {
                Some(rho_nu) => (
                    "x,rho,rho_nu",
                    out.x
                        .iter()
                        .zip(&out.rho)
                        .zip(rho_nu)
                        .map(|((&x, &r), &rn)| vec![x, r, rn])
                        .collect(),
                ),
                None => (
                    "x,rho",
                    out.x
                        .iter()
                        .zip(&out.rho)
                        .map(|(&x, &r)| vec![x, r])
                        .collect(),
                ),
            };
            emit_csv_to(cfg.output.as_deref(), header, &rows)
                .map_err(|e| apkinetics::ConfigError::File(e.to_string()))?;
        }
        Command::SweepEps { common, eps_values } => {
            let cfg = common.build_config()?;
            let result = sweep_eps(&cfg, eps_values)?;
            let rows: Vec<Vec<f64>> = result
                .iter()
                .map(|r| vec![r.eps, r.error_linf, r.runtime_s])
                .collect();
            emit_csv_to(cfg.output.as_deref(), "eps,error_Linf,runtime_s", &rows)
                .map_err(|e| apkinetics::ConfigError::File(e.to_string()))?;
        }
        Command::SweepDt { common, dt_values } => {
            let cfg = common.build_config()?;
            let result = sweep_dt(&cfg, dt_values)?;
            let rows: Vec<Vec<f64>> = result
                .iter()
                .map(|r| vec![r.dt, r.error_linf, r.runtime_s])
                .collect();
            emit_csv_to(cfg.output.as_deref(), "dt,error_Linf,runtime_s", &rows)
                .map_err(|e| apkinetics::ConfigError::File(e.to_string()))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(RunError::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(RunError::Numerics(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
