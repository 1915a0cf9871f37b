use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Uniform grid on the unit circle at angles `−π + 2π(k + ½)/n`, `n = 2^k`.
///
/// The half-step offset keeps samples away from the edges of the standard
/// density cells. Boundary functions are sample vectors on this grid with
/// the inner product `(1/n) Σ f ḡ`.
#[derive(Clone)]
pub struct BoundaryGrid {
    pub n: usize,
    pub angles: Vec<f64>,
    pub points: Vec<Complex64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for BoundaryGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BoundaryGrid").field("n", &self.n).finish()
    }
}

pub const DEFAULT_GRID: usize = 1 << 12;

impl BoundaryGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 4 || !n.is_power_of_two() {
            return Err(Error::invalid(format!("grid size {n} must be a power of two ≥ 4")));
        }
        let angles: Vec<f64> = (0..n).map(|k| -PI + 2.0 * PI * (k as f64 + 0.5) / n as f64).collect();
        let points = angles.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
        let mut planner = FftPlanner::new();
        Ok(BoundaryGrid { n, angles, points, forward: planner.plan_fft_forward(n), inverse: planner.plan_fft_inverse(n) })
    }

    /// Discrete Fourier coefficients `a_m`, `m ∈ [−n/2, n/2)`, stored in FFT order.
    pub fn coefficients(&self, samples: &[Complex64]) -> Vec<Complex64> {
        let mut buf = samples.to_vec();
        self.forward.process(&mut buf);
        let shift = PI / self.n as f64 - PI;
        for (m, v) in buf.iter_mut().enumerate() {
            let freq = self.frequency(m) as f64;
            *v *= Complex64::from_polar(1.0 / self.n as f64, -freq * shift);
        }
        buf
    }

    /// Inverse of [`coefficients`](Self::coefficients).
    pub fn synthesize(&self, coefs: &[Complex64]) -> Vec<Complex64> {
        let shift = PI / self.n as f64 - PI;
        let mut buf: Vec<Complex64> =
            coefs.iter().enumerate().map(|(m, v)| v * Complex64::from_polar(1.0, self.frequency(m) as f64 * shift)).collect();
        self.inverse.process(&mut buf);
        buf
    }

    fn frequency(&self, m: usize) -> i64 {
        if m < self.n / 2 {
            m as i64
        } else {
            m as i64 - self.n as i64
        }
    }

    fn mask(&self, samples: &[Complex64], keep_analytic: bool) -> Vec<Complex64> {
        let mut buf = samples.to_vec();
        self.forward.process(&mut buf);
        let scale = 1.0 / self.n as f64;
        for (m, v) in buf.iter_mut().enumerate() {
            let analytic = self.frequency(m) >= 0;
            *v = if analytic == keep_analytic { *v * scale } else { Complex64::new(0.0, 0.0) };
        }
        self.inverse.process(&mut buf);
        buf
    }

    /// Orthogonal projection onto `H²` (nonnegative frequencies).
    pub fn analytic_part(&self, samples: &[Complex64]) -> Vec<Complex64> {
        self.mask(samples, true)
    }

    /// Orthogonal projection onto `H²₋` (negative frequencies).
    pub fn antianalytic_part(&self, samples: &[Complex64]) -> Vec<Complex64> {
        self.mask(samples, false)
    }

    pub fn inner(&self, a: &[Complex64], b: &[Complex64]) -> Complex64 {
        a.iter().zip(b).map(|(x, y)| x * y.conj()).sum::<Complex64>() / self.n as f64
    }

    pub fn norm(&self, a: &[Complex64]) -> f64 {
        (a.iter().map(|z| z.norm_sqr()).sum::<f64>() / self.n as f64).sqrt()
    }

    /// Value at `λ ∈ 𝔻` of the analytic function whose boundary samples are
    /// given, by summing its Taylor series.
    pub fn analytic_extension(&self, samples: &[Complex64], lambda: Complex64) -> Result<Complex64> {
        if lambda.norm() >= 1.0 {
            return Err(Error::BoundaryPoint(format!("{lambda}")));
        }
        let a = self.coefficients(samples);
        let mut s = Complex64::new(0.0, 0.0);
        for m in (0..self.n / 2).rev() {
            s = s * lambda + a[m];
        }
        Ok(s)
    }

    /// Grid indices whose angles lie strictly inside the arc `(lo, hi)`.
    pub fn indices_in_arc(&self, lo: f64, hi: f64) -> Vec<usize> {
        (0..self.n)
            .filter(|&k| {
                let rel = (self.angles[k] - lo).rem_euclid(2.0 * PI);
                rel > 0.0 && rel < hi - lo
            })
            .collect()
    }
}
