//! Physical model: the two kinetic regimes, their equilibria, collision
//! frequencies, scaling exponents, and built-in initial data.
//!
//! The kinetic equation is
//!
//! ```text
//!     ε^α ∂_t f + ε v ∂_x f = ν(v) (ρ_ν M − f),      ρ_ν = ⟨ν f⟩ / ⟨ν M⟩,
//! ```
//!
//! in d = 1 velocity dimension. The two supported regimes are:
//!
//! - [`ModelCase::HeavyTail`]: `M(v) = m / (1 + |v|^β)` with `β ∈ (1, 3)`,
//!   `ν(v) ≡ 1`, `α = β − 1`; the normalization `m = β sin(π/β) / (2π)` makes
//!   the full-line integral of M equal to 1.
//! - [`ModelCase::Degenerate`]: Gaussian `M`, `ν(v) = ν₀ |v|^{3+β}` with
//!   `β > 0`, `α = (4+β)/(2+β)`.

use crate::ConfigError;

/// Which physical regime, with its parameters and derived constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelCase {
    /// Power-tailed equilibrium, constant collision frequency (Case 1).
    HeavyTail {
        /// Tail exponent β ∈ (1, 3) (open interval, d = 1).
        beta: f64,
    },
    /// Gaussian equilibrium, degenerate collision frequency ν₀|v|^{3+β} (Case 2).
    Degenerate {
        /// Degeneracy exponent β > 0.
        beta: f64,
        /// Collision frequency amplitude ν₀ > 0.
        nu0: f64,
    },
}

impl ModelCase {
    /// Heavy-tail case with validation of β ∈ (d, d+2) = (1, 3).
    pub fn heavy_tail(beta: f64) -> Result<Self, ConfigError> {
        if !(beta > 1.0 && beta < 3.0) {
            return Err(ConfigError::InvalidParameter(format!(
                "heavy-tail beta must lie in (1, 3), got {beta}"
            )));
        }
        Ok(ModelCase::HeavyTail { beta })
    }

    /// Degenerate case with validation of β > 0, ν₀ > 0.
    pub fn degenerate(beta: f64, nu0: f64) -> Result<Self, ConfigError> {
        if !(beta > 0.0) {
            return Err(ConfigError::InvalidParameter(format!(
                "degenerate beta must be positive, got {beta}"
            )));
        }
        if !(nu0 > 0.0) {
            return Err(ConfigError::InvalidParameter(format!(
                "nu0 must be positive, got {nu0}"
            )));
        }
        Ok(ModelCase::Degenerate { beta, nu0 })
    }

    /// Scaling exponent α of the anomalous limit:
    /// β − 1 (heavy tail) or (4+β)/(2+β) (degenerate), d = 1.
    pub fn alpha(&self) -> f64 {
        match *self {
            ModelCase::HeavyTail { beta } => beta - 1.0,
            ModelCase::Degenerate { beta, .. } => (4.0 + beta) / (2.0 + beta),
        }
    }

    /// Tail exponent β.
    pub fn beta(&self) -> f64 {
        match *self {
            ModelCase::HeavyTail { beta } | ModelCase::Degenerate { beta, .. } => beta,
        }
    }

    /// Analytic normalization constant m of the heavy-tail equilibrium
    /// (1/√(2π) for the Gaussian), so that ∫ M dv = 1 on the full line.
    pub fn m(&self) -> f64 {
        match *self {
            ModelCase::HeavyTail { beta } => {
                beta * (std::f64::consts::PI / beta).sin() / (2.0 * std::f64::consts::PI)
            }
            ModelCase::Degenerate { .. } => 1.0 / (2.0 * std::f64::consts::PI).sqrt(),
        }
    }

    /// Equilibrium M(v) ≥ 0, even in v, normalized on the full line.
    pub fn equilibrium(&self, v: f64) -> f64 {
        match *self {
            ModelCase::HeavyTail { beta } => self.m() / (1.0 + v.abs().powf(beta)),
            ModelCase::Degenerate { .. } => (-v * v / 2.0).exp() * self.m(),
        }
    }

    /// Collision frequency ν(v) ≥ 0, even in v.
    pub fn collision_frequency(&self, v: f64) -> f64 {
        match *self {
            ModelCase::HeavyTail { .. } => 1.0,
            ModelCase::Degenerate { beta, nu0 } => nu0 * v.abs().powf(3.0 + beta),
        }
    }

    /// Relaxation factor λ(v) = Δt ν(v) / (ε^α + Δt ν(v)) ∈ [0, 1).
    pub fn relaxation_factor(&self, v: f64, dt: f64, eps: f64) -> f64 {
        let nu = self.collision_frequency(v);
        let ea = eps.powf(self.alpha());
        dt * nu / (ea + dt * nu)
    }
}

/// Descriptor of the initial condition f₀(x, v).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialData {
    /// f₀(x, v) = (1 + sin(πx)) M(v): equilibrium-prepared data with a single
    /// excited spatial harmonic.
    WellPrepared,
}

impl InitialData {
    /// Initial density profile ρ₀(x).
    pub fn rho0(&self, x: f64) -> f64 {
        match self {
            InitialData::WellPrepared => 1.0 + (std::f64::consts::PI * x).sin(),
        }
    }

    /// Initial phase-space value f₀(x, v).
    pub fn f0(&self, case: &ModelCase, x: f64, v: f64) -> f64 {
        self.rho0(x) * case.equilibrium(v)
    }
}

/// Collision operator Q(f) = ν(v)(ρ_ν M − f) with ρ_ν = ⟨νf⟩/⟨νM⟩, applied
/// row by row in x; the discrete v-bracket of the result vanishes to roundoff
/// (local mass conservation).
pub fn apply_collision(
    case: &ModelCase,
    f: &crate::micromacro::PhaseSpaceField,
    grid: &crate::quadrature::VelocityGrid,
) -> crate::micromacro::PhaseSpaceField {
    let n_v = grid.n_v;
    let m_nodes: Vec<f64> = grid.nodes.iter().map(|&v| case.equilibrium(v)).collect();
    let nu_nodes: Vec<f64> = grid
        .nodes
        .iter()
        .map(|&v| case.collision_frequency(v))
        .collect();
    let nu_m_mass: f64 = grid.dv
        * m_nodes
            .iter()
            .zip(&nu_nodes)
            .map(|(m, nu)| m * nu)
            .sum::<f64>();
    let mut out = crate::micromacro::PhaseSpaceField::zeros(f.n_x, n_v);
    for ix in 0..f.n_x {
        let mut nu_f = 0.0;
        for iv in 0..n_v {
            nu_f += nu_nodes[iv] * f.at(ix, iv);
        }
        let rho_nu = grid.dv * nu_f / nu_m_mass;
        for iv in 0..n_v {
            *out.at_mut(ix, iv) = nu_nodes[iv] * (rho_nu * m_nodes[iv] - f.at(ix, iv));
        }
    }
    out
}
