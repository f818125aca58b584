//! Run configuration: defaults, flat key=value file parsing, validation.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::micromacro::MacroClosure;
use crate::model::ModelCase;
use crate::ConfigError;

/// Which model case to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CaseKind {
    /// Heavy-tailed equilibrium, constant collision frequency.
    #[default]
    HeavyTail,
    /// Gaussian equilibrium, degenerate collision frequency ν₀|v|^{3+β}.
    Degenerate,
}

impl FromStr for CaseKind {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s {
            "heavy-tail" | "heavy_tail" | "heavytail" => Ok(CaseKind::HeavyTail),
            "degenerate" => Ok(CaseKind::Degenerate),
            other => Err(ConfigError::InvalidParameter(format!(
                "unknown case '{other}' (expected heavy-tail or degenerate)"
            ))),
        }
    }
}

/// Which scheme to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    /// Micro–macro AP scheme (default).
    #[default]
    MicroMacro,
    /// Duhamel-based uniformly accurate scheme.
    Duhamel,
    /// Direct implicit AP scheme.
    Implicit,
    /// Exact solver of the limit equation.
    Limit,
}

impl FromStr for Scheme {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s {
            "micromacro" | "micro-macro" => Ok(Scheme::MicroMacro),
            "duhamel" => Ok(Scheme::Duhamel),
            "implicit" => Ok(Scheme::Implicit),
            "limit" => Ok(Scheme::Limit),
            other => Err(ConfigError::InvalidParameter(format!(
                "unknown scheme '{other}' (expected micromacro, duhamel, implicit, or limit)"
            ))),
        }
    }
}

/// Full run configuration. All fields have defaults; a flat key=value file
/// and/or individual overrides refine them.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub case: CaseKind,
    /// Equilibrium tail / degeneracy exponent β. `None` means the per-case
    /// default (2.5 heavy-tail, 0.5 degenerate).
    pub beta: Option<f64>,
    /// Collision amplitude ν₀ (degenerate case only).
    pub nu0: f64,
    pub eps: f64,
    pub dt: f64,
    pub t_final: f64,
    pub n_x: usize,
    pub v_max: f64,
    pub n_v: usize,
    pub w_max: f64,
    pub n_w: usize,
    pub scheme: Scheme,
    pub macro_closure: MacroClosure,
    /// CSV output path; `None` writes to stdout.
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            case: CaseKind::HeavyTail,
            beta: None,
            nu0: 1.0,
            eps: 1e-3,
            dt: 1e-3,
            t_final: 0.1,
            n_x: 64,
            v_max: 5.0,
            n_v: 200,
            w_max: 20.0,
            n_w: 200,
            scheme: Scheme::MicroMacro,
            macro_closure: MacroClosure::Implicit,
            output: None,
        }
    }
}

impl RunConfig {
    /// β actually in effect (explicit value or per-case default).
    pub fn beta_effective(&self) -> f64 {
        self.beta.unwrap_or(match self.case {
            CaseKind::HeavyTail => 2.5,
            CaseKind::Degenerate => 0.5,
        })
    }

    /// Construct the validated model case.
    pub fn model_case(&self) -> Result<ModelCase, ConfigError> {
        match self.case {
            CaseKind::HeavyTail => ModelCase::heavy_tail(self.beta_effective()),
            CaseKind::Degenerate => ModelCase::degenerate(self.beta_effective(), self.nu0),
        }
    }

    /// Apply a single `key=value` override.
    pub fn apply_kv(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        fn num<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
            value.parse().map_err(|_| {
                ConfigError::InvalidParameter(format!("could not parse {key} = '{value}'"))
            })
        }
        match key {
            "case" => self.case = value.parse()?,
            "beta" => self.beta = Some(num(key, value)?),
            "nu0" => self.nu0 = num(key, value)?,
            "eps" => self.eps = num(key, value)?,
            "dt" => self.dt = num(key, value)?,
            "t_final" => self.t_final = num(key, value)?,
            "n_x" => self.n_x = num(key, value)?,
            "v_max" => self.v_max = num(key, value)?,
            "n_v" => self.n_v = num(key, value)?,
            "w_max" => self.w_max = num(key, value)?,
            "n_w" => self.n_w = num(key, value)?,
            "scheme" => self.scheme = value.parse()?,
            "macro_closure" => {
                self.macro_closure = match value {
                    "implicit" => MacroClosure::Implicit,
                    "explicit" => MacroClosure::Explicit,
                    other => {
                        return Err(ConfigError::InvalidParameter(format!(
                            "unknown macro_closure '{other}' (expected implicit or explicit)"
                        )))
                    }
                }
            }
            "output" => self.output = Some(PathBuf::from(value)),
            other => {
                return Err(ConfigError::InvalidParameter(format!(
                    "unknown config key '{other}'"
                )))
            }
        }
        Ok(())
    }

    /// Parse a flat key=value file (`#` comments and blank lines allowed)
    /// on top of the current values.
    pub fn apply_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::File(format!("{}: {e}", path.display())))?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                ConfigError::File(format!(
                    "{}:{}: expected key=value, got '{line}'",
                    path.display(),
                    lineno + 1
                ))
            })?;
            self.apply_kv(key.trim(), value.trim())?;
        }
        Ok(())
    }

    /// Check parameter ranges before a run.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.model_case()?;
        for (name, value) in [
            ("eps", self.eps),
            ("dt", self.dt),
            ("t_final", self.t_final),
        ] {
            if !(value > 0.0) {
                return Err(ConfigError::InvalidParameter(format!(
                    "{name} must be positive, got {value}"
                )));
            }
        }
        if self.n_x == 0 || !self.n_x.is_power_of_two() {
            return Err(ConfigError::InvalidParameter(format!(
                "n_x must be a power of two, got {}",
                self.n_x
            )));
        }
        crate::quadrature::VelocityGrid::new(self.v_max, self.n_v)?;
        crate::quadrature::SubstitutedGrid::new(self.w_max, self.n_w)?;
        Ok(())
    }
}
