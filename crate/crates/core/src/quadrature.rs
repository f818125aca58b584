//! Velocity integration: midpoint brackets, the substituted-variable
//! evaluation of the stiff integrals 𝓘 and 𝓙, the diffusion coefficient κ,
//! and numerically stable exponential time kernels.
//!
//! # The substituted variable
//!
//! The integrals that produce the fractional symbol concentrate, as ε → 0, on
//! the far tail of the v-grid (heavy-tail case) or on the degeneracy point
//! v = 0 (degenerate case). Both are out of reach of any fixed v-grid, so the
//! stiff brackets are computed after the changes of variables
//!
//! - heavy tail:  `w = ε λ |k| v`   (λ is constant since ν ≡ 1),
//! - degenerate:  `w = ε |k| v / ν(v)`, with inverse
//!   `v(w) = sign(w) (ε|k| / (ν₀ |w|))^{1/(2+β)}`,
//!
//! which map the stiff region onto a fixed, ε-independent w-grid.
//!
//! # Product-integration weights
//!
//! After substitution the integrands carry a non-smooth power factor:
//! `|w|^{2−β}` (heavy tail, singular at 0 for β > 2) and `|w|^{−2/(2+β)}`
//! (degenerate, always singular at 0). A plain rectangle rule on such factors
//! converges too slowly to meet the κ accuracy targets, so each w-cell is
//! weighted by the *exact* cell moment of its power factor, with the smooth
//! remainder evaluated at the midpoint. The integral beyond w_max is closed by
//! an analytic two-term tail expansion.

use num_complex::Complex64;

use crate::model::ModelCase;
use crate::ConfigError;

/// Largest magnitude passed to `exp`; beyond this the result under/overflows
/// f64 anyway and the clamp keeps intermediates finite.
const EXP_CLAMP: f64 = 700.0;

/// Symmetric midpoint grid on [−v_max, v_max]: nodes at cell centers, so
/// v = 0 is never a node and v ↦ −v maps nodes to nodes.
#[derive(Debug, Clone)]
pub struct VelocityGrid {
    pub v_max: f64,
    pub n_v: usize,
    pub dv: f64,
    pub nodes: Vec<f64>,
}

impl VelocityGrid {
    pub fn new(v_max: f64, n_v: usize) -> Result<Self, ConfigError> {
        if !(v_max > 0.0) {
            return Err(ConfigError::InvalidParameter(format!(
                "v_max must be positive, got {v_max}"
            )));
        }
        if n_v == 0 || n_v % 2 != 0 {
            return Err(ConfigError::InvalidParameter(format!(
                "N_v must be a positive even integer, got {n_v}"
            )));
        }
        let dv = 2.0 * v_max / n_v as f64;
        let nodes = (0..n_v).map(|i| -v_max + dv * (i as f64 + 0.5)).collect();
        Ok(VelocityGrid {
            v_max,
            n_v,
            dv,
            nodes,
        })
    }

    /// Midpoint bracket ⟨fn⟩ = Δv Σ fn(v_p).
    pub fn bracket(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.dv * self.nodes.iter().map(|&v| f(v)).sum::<f64>()
    }

    /// Midpoint bracket of a complex-valued integrand.
    pub fn bracket_complex(&self, f: impl Fn(f64) -> Complex64) -> Complex64 {
        self.dv * self.nodes.iter().map(|&v| f(v)).sum::<Complex64>()
    }
}

/// Midpoint grid for the substituted variable w, independent of ε and k,
/// together with cached product-integration weights for a model case.
#[derive(Debug, Clone)]
pub struct SubstitutedGrid {
    pub w_max: f64,
    pub n_w: usize,
    pub dw: f64,
    pub nodes: Vec<f64>,
}

impl SubstitutedGrid {
    pub fn new(w_max: f64, n_w: usize) -> Result<Self, ConfigError> {
        if !(w_max > 0.0) {
            return Err(ConfigError::InvalidParameter(format!(
                "w_max must be positive, got {w_max}"
            )));
        }
        if n_w == 0 || n_w % 2 != 0 {
            return Err(ConfigError::InvalidParameter(format!(
                "N_w must be a positive even integer, got {n_w}"
            )));
        }
        let dw = 2.0 * w_max / n_w as f64;
        let nodes = (0..n_w).map(|i| -w_max + dw * (i as f64 + 0.5)).collect();
        Ok(SubstitutedGrid {
            w_max,
            n_w,
            dw,
            nodes,
        })
    }

    /// Exact cell moments of |w|^{2−β} over the w-cells (heavy-tail power
    /// factor). Uses the antiderivative sign(w)|w|^{3−β}/(3−β), finite for
    /// β < 3.
    pub fn power_weights_heavy(&self, beta: f64) -> Vec<f64> {
        let p = 3.0 - beta;
        let prim = |w: f64| w.signum() * w.abs().powf(p) / p;
        (0..self.n_w)
            .map(|i| {
                let a = -self.w_max + self.dw * i as f64;
                let b = a + self.dw;
                prim(b) - prim(a)
            })
            .collect()
    }

    /// Exact cell moments of |w|^{−2/(2+β)} over the w-cells (degenerate
    /// power factor). Uses the antiderivative sign(w)|w|^{1−a}/(1−a) with
    /// a = 2/(2+β) < 1.
    pub fn power_weights_degenerate(&self, beta: f64) -> Vec<f64> {
        let a = 2.0 / (2.0 + beta);
        let p = 1.0 - a;
        let prim = |w: f64| w.signum() * w.abs().powf(p) / p;
        (0..self.n_w)
            .map(|i| {
                let lo = -self.w_max + self.dw * i as f64;
                let hi = lo + self.dw;
                prim(hi) - prim(lo)
            })
            .collect()
    }

    /// One-sided tail ∫_{w_max}^∞ w^{2−β}/(1+w²) dw, two-term asymptotic
    /// expansion in 1/w².
    pub fn tail_heavy(&self, beta: f64) -> f64 {
        self.w_max.powf(1.0 - beta) / (beta - 1.0) - self.w_max.powf(-1.0 - beta) / (beta + 1.0)
    }

    /// One-sided tail ∫_{w_max}^∞ w^{−a}/(1+w²) dw with a = 2/(2+β),
    /// two-term asymptotic expansion in 1/w².
    pub fn tail_degenerate(&self, beta: f64) -> f64 {
        let a = 2.0 / (2.0 + beta);
        self.w_max.powf(-a - 1.0) / (a + 1.0) - self.w_max.powf(-a - 3.0) / (a + 3.0)
    }
}

/// Diffusion coefficient κ of the limit equation, computed on the w-grid.
///
/// Heavy tail: κ = m ∫ |w|^{2−β}/(1+w²) dw.
/// Degenerate: κ = M(0) ν₀^{1−α}/(2+β) ∫ |w|^{−2/(2+β)}/(1+w²) dw.
///
/// Both integrals use product weights for the power factor and the analytic
/// two-term closure beyond w_max.
pub fn kappa(case: &ModelCase, grid: &SubstitutedGrid) -> f64 {
    match *case {
        ModelCase::HeavyTail { beta } => {
            let weights = grid.power_weights_heavy(beta);
            let core: f64 = grid
                .nodes
                .iter()
                .zip(&weights)
                .map(|(&w, &pw)| pw / (1.0 + w * w))
                .sum();
            case.m() * (core + 2.0 * grid.tail_heavy(beta))
        }
        ModelCase::Degenerate { beta, nu0 } => {
            let weights = grid.power_weights_degenerate(beta);
            let core: f64 = grid
                .nodes
                .iter()
                .zip(&weights)
                .map(|(&w, &pw)| pw / (1.0 + w * w))
                .sum();
            let pref = case.equilibrium(0.0) * nu0.powf(1.0 - case.alpha()) / (2.0 + beta);
            pref * (core + 2.0 * grid.tail_degenerate(beta))
        }
    }
}

/// The stiff Fourier multiplier 𝓘(k):
///
/// ```text
///     𝓘 = ε^{2−α} ⟨ ν λ² (kv)² M / (ν² + ε² λ² (kv)²) ⟩,
/// ```
///
/// evaluated through the substituted variable so the value stays accurate
/// uniformly in ε, with 𝓘(k) → κ_h |k|^α as ε → 0 on the same grid.
pub fn transformed_i(case: &ModelCase, k: f64, eps: f64, dt: f64, grid: &SubstitutedGrid) -> f64 {
    transformed_stiff(case, k, eps, dt, grid, 2)
}

/// The companion multiplier 𝓙 (one extra λ factor), used by the implicit
/// scheme's denominator.
pub fn transformed_j(case: &ModelCase, k: f64, eps: f64, dt: f64, grid: &SubstitutedGrid) -> f64 {
    transformed_stiff(case, k, eps, dt, grid, 3)
}

/// Shared evaluator: λ-power 2 gives 𝓘, λ-power 3 gives 𝓙.
fn transformed_stiff(
    case: &ModelCase,
    k: f64,
    eps: f64,
    dt: f64,
    grid: &SubstitutedGrid,
    lambda_power: i32,
) -> f64 {
    if k == 0.0 {
        return 0.0;
    }
    let ak = k.abs();
    let alpha = case.alpha();
    match *case {
        ModelCase::HeavyTail { beta } => {
            // lambda is constant; substitution w = eps*lambda*|k|*v.
            let lam = dt / (eps.powf(alpha) + dt);
            let c = eps * lam * ak;
            let weights = grid.power_weights_heavy(beta);
            let core: f64 = grid
                .nodes
                .iter()
                .zip(&weights)
                .map(|(&w, &pw)| pw * w.abs().powf(beta) * case.equilibrium(w / c) / (1.0 + w * w))
                .sum();
            let mut value = eps.powf(-1.0 - alpha) / (lam * ak) * core
                + (lam * ak).powf(alpha) * 2.0 * case.m() * grid.tail_heavy(beta);
            if lambda_power == 3 {
                value *= lam;
            }
            value
        }
        ModelCase::Degenerate { beta, nu0 } => {
            // substitution w = eps*|k|*v/nu(v) with inverse
            // v(w) = sign(w) (eps|k| / (nu0 |w|))^{1/(2+beta)}.
            let weights = grid.power_weights_degenerate(beta);
            let pref = nu0.powf(1.0 - alpha) * ak.powf(alpha) / (2.0 + beta);
            let core: f64 = grid
                .nodes
                .iter()
                .zip(&weights)
                .map(|(&w, &pw)| {
                    let vw = w.signum() * (eps * ak / (nu0 * w.abs())).powf(1.0 / (2.0 + beta));
                    let lw = case.relaxation_factor(vw, dt, eps);
                    pw * lw.powi(lambda_power) * case.equilibrium(vw) / (1.0 + lw * lw * w * w)
                })
                .sum();
            let tail = 2.0 * case.equilibrium(0.0) * grid.tail_degenerate(beta);
            pref * (core + tail)
        }
    }
}

/// E0(a, τ) = (1 − e^{−aτ}) / a = ∫₀^τ e^{−as} ds.
///
/// Series below |aτ| = 1/2 (16 terms, truncation ≲ 10⁻¹⁹ relative), clamped
/// closed form above; finite for all Re(a) ≥ 0 including a = 0.
pub fn kernel_e0(a: Complex64, tau: f64) -> Complex64 {
    debug_assert!(a.re >= 0.0, "kernel_e0 requires Re(a) >= 0");
    let x = a * tau;
    if x.norm() < 0.5 {
        // tau * sum_{n>=0} (-x)^n / (n+1)!
        let mut sum = Complex64::new(1.0, 0.0);
        let mut term = Complex64::new(1.0, 0.0);
        for n in 1..16 {
            term *= -x / (n as f64 + 1.0);
            sum += term;
        }
        tau * sum
    } else {
        (1.0 - exp_clamped(-x)) / a
    }
}

/// E1(a, τ) = (1 − (1+aτ) e^{−aτ}) / (a²τ) = (1/τ) ∫₀^τ s e^{−as} ds.
pub fn kernel_e1(a: Complex64, tau: f64) -> Complex64 {
    debug_assert!(a.re >= 0.0, "kernel_e1 requires Re(a) >= 0");
    let x = a * tau;
    if x.norm() < 0.5 {
        // tau * sum_{n>=0} (-x)^n (n+1) / (n+2)!
        let mut sum = Complex64::new(0.5, 0.0);
        let mut term = Complex64::new(0.5, 0.0);
        for n in 1..16 {
            let nf = n as f64;
            term *= -x * (nf + 1.0) / ((nf + 2.0) * nf);
            sum += term;
        }
        tau * sum
    } else {
        (1.0 - (1.0 + x) * exp_clamped(-x)) / (a * a * tau)
    }
}

/// exp with the real part clamped to ±[`EXP_CLAMP`] so intermediates stay
/// finite; flushes to exact zero below e^{−clamp}.
pub fn exp_clamped(z: Complex64) -> Complex64 {
    if z.re < -EXP_CLAMP {
        Complex64::new(0.0, 0.0)
    } else {
        Complex64::from_polar(z.re.min(EXP_CLAMP).exp(), z.im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelCase;

    fn heavy() -> ModelCase {
        ModelCase::heavy_tail(2.5).unwrap()
    }
    fn degen() -> ModelCase {
        ModelCase::degenerate(0.5, 1.0).unwrap()
    }
    fn grid() -> SubstitutedGrid {
        SubstitutedGrid::new(20.0, 200).unwrap()
    }

    #[test]
    fn grid_construction_validates() {
        assert!(VelocityGrid::new(5.0, 201).is_err());
        assert!(VelocityGrid::new(-1.0, 200).is_err());
        assert!(SubstitutedGrid::new(20.0, 0).is_err());
        let g = VelocityGrid::new(5.0, 200).unwrap();
        // symmetric, zero excluded
        for (i, &v) in g.nodes.iter().enumerate() {
            assert!((v + g.nodes[g.n_v - 1 - i]).abs() < 1e-14);
            assert!(v != 0.0);
        }
    }

    #[test]
    fn bracket_constant_and_odd() {
        let g = VelocityGrid::new(5.0, 200).unwrap();
        assert!((g.bracket(|_| 1.0) - 10.0).abs() < 1e-12);
        let case = heavy();
        let odd = g.bracket(|v| v * case.equilibrium(v));
        assert!(odd.abs() < 1e-15, "odd moment {odd}");
    }

    #[test]
    fn bracket_gaussian_mass() {
        // <M> on a fine grid matches erf closed form within the tail bound
        let g = VelocityGrid::new(8.0, 1600).unwrap();
        let case = degen();
        let mass = g.bracket(|v| case.equilibrium(v));
        // erf(8/sqrt(2)) ~ 1 - 1.2e-15
        assert!((mass - 1.0).abs() < 1e-6, "mass {mass}");
    }

    #[test]
    fn kappa_mirror_symmetric() {
        // evaluating on the mirrored grid (w -> -w reverses node order)
        // changes nothing because the integrand is even
        let g = grid();
        let k1 = kappa(&heavy(), &g);
        let mirrored = SubstitutedGrid {
            nodes: g.nodes.iter().rev().map(|w| -w).collect(),
            ..g.clone()
        };
        let k2 = kappa(&heavy(), &mirrored);
        assert!((k1 - k2).abs() < 1e-14 * k1);
    }

    #[test]
    fn transformed_i_zero_mode() {
        assert_eq!(transformed_i(&heavy(), 0.0, 1e-3, 1e-3, &grid()), 0.0);
        assert_eq!(transformed_i(&degen(), 0.0, 1e-3, 1e-3, &grid()), 0.0);
    }

    #[test]
    fn transformed_i_even_nonnegative() {
        let g = grid();
        for case in [heavy(), degen()] {
            for eps in [1.0, 1e-2, 1e-6] {
                for k in [std::f64::consts::PI, 3.0 * std::f64::consts::PI] {
                    let ip = transformed_i(&case, k, eps, 1e-3, &g);
                    let im = transformed_i(&case, -k, eps, 1e-3, &g);
                    assert!(ip >= 0.0);
                    assert!((ip - im).abs() <= 1e-14 * ip.abs());
                }
            }
        }
    }

    #[test]
    fn transformed_i_direct_quadrature_cross_check() {
        // heavy tail at eps = 1: the substituted evaluation agrees with a
        // direct fine-grid midpoint quadrature of the defining bracket. The
        // smooth remainder varies on the scale eps*lambda*|k| ~ 3e-3 here, so
        // the oracle comparison needs a refined w-grid; on the default grid
        // this regime carries a few percent quadrature error, which is
        // harmless because dt*I is negligible at eps = O(1).
        let case = heavy();
        let fine_w = SubstitutedGrid::new(20.0, 400_000).unwrap();
        let (eps, dt, k): (f64, f64, f64) = (1.0, 1e-3, std::f64::consts::PI);
        let alpha = case.alpha();
        let fine = VelocityGrid::new(40_000.0, 4_000_000).unwrap();
        let lam = dt / (eps.powf(alpha) + dt);
        let direct = eps.powf(2.0 - alpha)
            * fine.bracket(|v| {
                let kv2 = (k * v) * (k * v);
                lam * lam * kv2 * case.equilibrium(v) / (1.0 + eps * eps * lam * lam * kv2)
            });
        let subst = transformed_i(&case, k, eps, dt, &fine_w);
        let rel = (subst - direct).abs() / direct;
        assert!(rel < 1e-2, "substituted {subst} vs direct {direct}, rel {rel}");
    }

    #[test]
    fn transformed_i_degenerate_approaches_limit_symbol() {
        // I(k) -> kappa |k|^alpha from below as eps -> 0; the approach rate is
        // only eps^{1/(2+beta)} because lambda(v(w)) saturates slowly at the
        // w-grid edge, so full agreement needs very small eps
        let g = grid();
        let case = degen();
        let kap = kappa(&case, &g);
        for k in [std::f64::consts::PI, 4.0 * std::f64::consts::PI] {
            let limit = kap * k.abs().powf(case.alpha());
            let mut prev_gap = f64::INFINITY;
            for eps in [1e-4, 1e-6, 1e-8, 1e-10, 1e-12] {
                let gap = limit - transformed_i(&case, k, eps, 1e-3, &g);
                assert!(gap > 0.0, "I exceeded the limit symbol at eps = {eps}");
                assert!(gap < prev_gap, "gap grew at eps = {eps}");
                prev_gap = gap;
            }
            assert!(
                prev_gap / limit < 1e-3,
                "relative gap {} at eps = 1e-12",
                prev_gap / limit
            );
        }
    }

    #[test]
    fn kernels_at_zero_and_large_argument() {
        let z = Complex64::new(0.0, 0.0);
        assert!((kernel_e0(z, 2.0) - Complex64::new(2.0, 0.0)).norm() < 1e-15);
        assert!((kernel_e1(z, 2.0) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let a = Complex64::new(100.0, 0.0);
        assert!((kernel_e0(a, 1.0).re - 0.01).abs() < 1e-12);
        assert!((kernel_e1(a, 1.0).re - 1e-4).abs() < 1e-12);
    }

    #[test]
    fn kernel_bounds_real_argument() {
        for a in [0.0, 1e-6, 0.3, 2.0, 50.0] {
            let tau = 0.7;
            let e0 = kernel_e0(Complex64::new(a, 0.0), tau);
            let e1 = kernel_e1(Complex64::new(a, 0.0), tau);
            assert!(e0.re <= tau + 1e-15 && e0.re >= 0.0);
            assert!(e1.re <= tau / 2.0 + 1e-15 && e1.re >= 0.0);
        }
    }

    #[test]
    fn kernel_no_overflow_huge_argument() {
        let a = Complex64::new(1e12, 3e11);
        let e0 = kernel_e0(a, 1.0);
        let e1 = kernel_e1(a, 1.0);
        assert!(e0.is_finite() && e1.is_finite());
    }
}
