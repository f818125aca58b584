//! Spatial grid and Fourier-mode plumbing for the periodic interval [−1, 1].
//!
//! The x-grid has N_x uniform points x_i = −1 + 2i/N_x; a 2-periodic real
//! function is represented per mode k_j = π j with j in the usual DFT layout
//! (0, 1, …, N/2−1, −N/2, …, −1). Amplitudes are stored normalized so that
//! `f(x_i) = Σ_j ρ̂_j e^{i k_j x_i}`.

use num_complex::Complex64;
use rustfft::FftPlanner;

/// Complex amplitude per Fourier mode k_j = πj of a 2-periodic function.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDensity {
    /// Mode amplitudes in DFT layout, normalized by 1/N.
    pub modes: Vec<Complex64>,
}

impl SpectralDensity {
    /// Number of modes (= number of x-grid points).
    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// Wavenumber k_j = πj of mode index j (DFT layout, j ≥ N/2 negative).
    pub fn wavenumber(n: usize, j: usize) -> f64 {
        let half = n / 2;
        let signed = if j < half {
            j as isize
        } else {
            j as isize - n as isize
        };
        std::f64::consts::PI * signed as f64
    }

    /// Forward transform of real x-grid samples (normalized by 1/N).
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len();
        let mut buf: Vec<Complex64> = samples.iter().map(|&s| Complex64::new(s, 0.0)).collect();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        let scale = 1.0 / n as f64;
        for z in &mut buf {
            *z *= scale;
        }
        SpectralDensity { modes: buf }
    }

    /// Inverse transform back to real x-grid samples (imaginary parts, which
    /// are roundoff for Hermitian data, are discarded).
    pub fn to_samples(&self) -> Vec<f64> {
        let n = self.modes.len();
        let mut buf = self.modes.clone();
        FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
        buf.into_iter().map(|z| z.re).collect()
    }
}

/// Uniform periodic x-grid points −1 + 2i/N on [−1, 1).
pub fn x_grid(n_x: usize) -> Vec<f64> {
    (0..n_x).map(|i| -1.0 + 2.0 * i as f64 / n_x as f64).collect()
}

/// In-place forward DFT of a complex buffer, normalized by 1/N.
pub fn forward(buf: &mut [Complex64]) {
    let n = buf.len();
    FftPlanner::new().plan_fft_forward(n).process(buf);
    let scale = 1.0 / n as f64;
    for z in buf.iter_mut() {
        *z *= scale;
    }
}

/// In-place inverse DFT of a complex buffer (inverse of [`forward`]).
pub fn inverse(buf: &mut [Complex64]) {
    let n = buf.len();
    FftPlanner::new().plan_fft_inverse(n).process(buf);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let xs = x_grid(64);
        let samples: Vec<f64> = xs
            .iter()
            .map(|&x| 1.0 + (std::f64::consts::PI * x).sin())
            .collect();
        let hat = SpectralDensity::from_samples(&samples);
        let back = hat.to_samples();
        for (a, b) in samples.iter().zip(&back) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn sine_spectrum_exact() {
        // In this DFT layout 1 + sin(pi x) on x_i = -1 + 2i/N has exactly
        // three nonzero amplitudes: mode 0 -> 1, mode +pi -> +i/2,
        // mode -pi -> -i/2 (the grid starts at x = -1, which flips the sign
        // relative to the x = 0 convention).
        let n = 64;
        let xs = x_grid(n);
        let samples: Vec<f64> = xs
            .iter()
            .map(|&x| 1.0 + (std::f64::consts::PI * x).sin())
            .collect();
        let hat = SpectralDensity::from_samples(&samples);
        assert!((hat.modes[0] - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        assert!((hat.modes[1] - Complex64::new(0.0, 0.5)).norm() < 1e-14);
        assert!((hat.modes[n - 1] - Complex64::new(0.0, -0.5)).norm() < 1e-14);
        for j in 2..n - 1 {
            assert!(hat.modes[j].norm() < 1e-14);
        }
        assert_eq!(SpectralDensity::wavenumber(n, 1), std::f64::consts::PI);
        assert_eq!(SpectralDensity::wavenumber(n, n - 1), -std::f64::consts::PI);
    }
}
