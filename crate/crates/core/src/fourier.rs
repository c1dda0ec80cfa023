//! Spectral operations on uniformly sampled periodic functions.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plans(n: usize) -> (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>) {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        (p.plan_fft_forward(n), p.plan_fft_inverse(n))
    })
}

/// Signed wavenumber of FFT bin `j`.
#[inline]
fn wavenumber(j: usize, n: usize) -> f64 {
    if j <= n / 2 {
        j as f64
    } else {
        j as f64 - n as f64
    }
}

/// Normalized Fourier coefficients `c_j` with `f(θ_i) = Σ_j c_j e^{i k_j θ_i}`.
pub fn coefficients(values: &[f64]) -> Vec<Complex64> {
    let n = values.len();
    let (fwd, _) = plans(n);
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fwd.process(&mut buf);
    let inv_n = 1.0 / n as f64;
    buf.iter_mut().for_each(|c| *c *= inv_n);
    buf
}

fn synthesize(mut coeffs: Vec<Complex64>) -> Vec<f64> {
    let n = coeffs.len();
    let (_, inv) = plans(n);
    inv.process(&mut coeffs);
    coeffs.iter().map(|c| c.re).collect()
}

/// First and second derivatives with respect to θ ∈ [0, 2π).
///
/// The Nyquist mode is dropped from the odd derivative.
pub fn derivatives(values: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = values.len();
    let c = coefficients(values);
    let mut d1 = c.clone();
    let mut d2 = c;
    for j in 0..n {
        let k = wavenumber(j, n);
        let nyquist = n % 2 == 0 && j == n / 2;
        d1[j] = if nyquist { Complex64::new(0.0, 0.0) } else { d1[j] * Complex64::new(0.0, k) };
        d2[j] *= -k * k;
    }
    (synthesize(d1), synthesize(d2))
}

/// First derivative only.
pub fn derivative(values: &[f64]) -> Vec<f64> {
    derivatives(values).0
}

/// Mean value (the zero mode).
pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Periodic antiderivative: returns `(mean, P)` with
/// `∫₀^θ f = mean·θ + P(θ) - P(0)` where `P` has zero mean.
pub fn antiderivative(values: &[f64]) -> (f64, Vec<f64>) {
    let n = values.len();
    let mut c = coefficients(values);
    let mean = c[0].re;
    c[0] = Complex64::new(0.0, 0.0);
    for j in 1..n {
        let nyquist = n % 2 == 0 && j == n / 2;
        c[j] = if nyquist {
            Complex64::new(0.0, 0.0)
        } else {
            c[j] / Complex64::new(0.0, wavenumber(j, n))
        };
    }
    (mean, synthesize(c))
}

/// Band-limited interpolant of a uniformly sampled periodic function.
#[derive(Debug, Clone)]
pub struct Interpolant {
    coeffs: Vec<Complex64>,
}

impl Interpolant {
    pub fn new(values: &[f64]) -> Self {
        Interpolant { coeffs: coefficients(values) }
    }

    /// Value and derivative at an arbitrary angle.
    pub fn eval_with_derivative(&self, theta: f64) -> (f64, f64) {
        let n = self.coeffs.len();
        let half = n / 2;
        let base = Complex64::from_polar(1.0, theta);
        let mut rot = Complex64::new(1.0, 0.0);
        let mut value = self.coeffs[0].re;
        let mut deriv = 0.0;
        for k in 1..=half {
            rot *= base;
            let nyquist = n % 2 == 0 && k == half;
            let cp = self.coeffs[k];
            let cm = self.coeffs[n - k];
            if nyquist {
                // split symmetrically between ±N/2
                value += cp.re * rot.re;
                deriv -= cp.re * k as f64 * rot.im;
            } else {
                value += (cp * rot + cm * rot.conj()).re;
                deriv += (Complex64::new(0.0, k as f64) * (cp * rot - cm * rot.conj())).re;
            }
        }
        (value, deriv)
    }

    pub fn eval(&self, theta: f64) -> f64 {
        self.eval_with_derivative(theta).0
    }
}

/// Uniform grid `θ_j = 2πj/N`.
pub fn grid(n: usize) -> Vec<f64> {
    (0..n).map(|j| 2.0 * PI * j as f64 / n as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivatives_of_trig_polynomial() {
        let n = 64;
        let th = grid(n);
        let f: Vec<f64> = th.iter().map(|t| (3.0 * t).sin() + 0.5 * (2.0 * t).cos()).collect();
        let (d1, d2) = derivatives(&f);
        for (i, t) in th.iter().enumerate() {
            assert!((d1[i] - (3.0 * (3.0 * t).cos() - (2.0 * t).sin())).abs() < 1e-12);
            assert!((d2[i] - (-9.0 * (3.0 * t).sin() - 2.0 * (2.0 * t).cos())).abs() < 1e-11);
        }
    }

    #[test]
    fn antiderivative_recovers_function() {
        let n = 32;
        let th = grid(n);
        let f: Vec<f64> = th.iter().map(|t| 2.0 + t.cos()).collect();
        let (mean, p) = antiderivative(&f);
        assert!((mean - 2.0).abs() < 1e-14);
        for (i, t) in th.iter().enumerate() {
            assert!((p[i] - t.sin()).abs() < 1e-13);
        }
    }

    #[test]
    fn interpolant_is_exact_for_band_limited_data() {
        let n = 16;
        let th = grid(n);
        let f: Vec<f64> = th.iter().map(|t| 1.0 + (2.0 * t).sin() - 0.25 * (5.0 * t).cos()).collect();
        let it = Interpolant::new(&f);
        for &t in &[0.1, 1.3, 2.9, 6.0] {
            let (v, d) = it.eval_with_derivative(t);
            assert!((v - (1.0 + (2.0 * t).sin() - 0.25 * (5.0 * t).cos())).abs() < 1e-13);
            assert!((d - (2.0 * (2.0 * t).cos() + 1.25 * (5.0 * t).sin())).abs() < 1e-12);
        }
    }
}
