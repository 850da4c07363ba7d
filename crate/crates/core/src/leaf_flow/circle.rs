use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::FlowError;
use crate::torus_maps::Phase;

/// Grid used for the monotonicity check.
pub const MONOTONE_GRID: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CircleFamily {
    Rigid,
    TrigPerturbed,
    Sampled,
}

/// Degree-one lift `g(x) = x + shift + Σ_k (cos_k cos 2πkx + sin_k sin 2πkx)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleLift {
    pub family: CircleFamily,
    pub shift: f64,
    /// Coefficient of `cos 2π(k+1)x` at index `k`.
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

impl CircleLift {
    pub fn rigid(c: f64) -> Self {
        CircleLift { family: CircleFamily::Rigid, shift: c, cos: Vec::new(), sin: Vec::new() }
    }

    /// `x + c + Σ amp·{sin,cos}(2π k x)`.
    pub fn trig(c: f64, terms: &[(f64, usize, Phase)]) -> Result<Self, FlowError> {
        let kmax = terms.iter().map(|t| t.1).max().unwrap_or(0);
        let mut g = CircleLift { family: CircleFamily::TrigPerturbed, shift: c, cos: vec![0.0; kmax], sin: vec![0.0; kmax] };
        for &(amp, k, phase) in terms {
            if k == 0 {
                g.shift += if phase == Phase::Cos { amp } else { 0.0 };
                continue;
            }
            match phase {
                Phase::Sin => g.sin[k - 1] += amp,
                Phase::Cos => g.cos[k - 1] += amp,
            }
        }
        g.check_monotone()?;
        Ok(g)
    }

    /// Trigonometric interpolant of displacements `g(i/N) − i/N`.
    pub fn sampled(displacement: &[f64]) -> Result<Self, FlowError> {
        let (shift, cos, sin) = fourier_coefficients(displacement);
        let g = CircleLift { family: CircleFamily::Sampled, shift, cos, sin };
        g.check_monotone()?;
        Ok(g)
    }

    pub fn modes(&self) -> usize {
        self.cos.len().max(self.sin.len())
    }

    /// Periodic displacement `g(x) − x` and its derivative.
    pub fn displacement(&self, x: f64) -> (f64, f64) {
        let (s1, c1) = (2.0 * PI * x).sin_cos();
        let (mut s, mut c) = (s1, c1);
        let mut d = self.shift;
        let mut dd = 0.0;
        for k in 0..self.modes() {
            let kk = 2.0 * PI * (k + 1) as f64;
            let a = self.cos.get(k).copied().unwrap_or(0.0);
            let b = self.sin.get(k).copied().unwrap_or(0.0);
            d += a * c + b * s;
            dd += kk * (b * c - a * s);
            let s_next = s * c1 + c * s1;
            c = c * c1 - s * s1;
            s = s_next;
        }
        (d, dd)
    }

    pub fn eval(&self, x: f64) -> f64 {
        x + self.displacement(x).0
    }

    pub fn deriv(&self, x: f64) -> f64 {
        1.0 + self.displacement(x).1
    }

    /// Sup of the periodic part, a bound on `|g(x) − x − shift|`.
    pub fn amplitude(&self) -> f64 {
        self.cos.iter().chain(&self.sin).map(|a| a.abs()).sum()
    }

    /// `g⁻¹(y)` by safeguarded Newton on the bracket `y − shift ± amplitude`.
    pub fn inverse(&self, y: f64) -> f64 {
        let amp = self.amplitude();
        let (mut lo, mut hi) = (y - self.shift - amp - 1e-12, y - self.shift + amp + 1e-12);
        let mut x = y - self.shift;
        for _ in 0..100 {
            let (d, dd) = self.displacement(x);
            let r = x + d - y;
            if r == 0.0 {
                return x;
            }
            if r > 0.0 {
                hi = hi.min(x);
            } else {
                lo = lo.max(x);
            }
            let step = r / (1.0 + dd);
            let mut next = x - step;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - x).abs() <= 1e-16 * (1.0 + x.abs()) {
                return next;
            }
            x = next;
        }
        x
    }

    pub fn translated(&self, tau: f64) -> Self {
        CircleLift { shift: self.shift + tau, ..self.clone() }
    }

    /// Strict monotonicity on a `10^4` grid.
    pub fn check_monotone(&self) -> Result<(), FlowError> {
        for i in 0..MONOTONE_GRID {
            let x = i as f64 / MONOTONE_GRID as f64;
            let d = self.deriv(x);
            if !(d > 0.0) {
                return Err(FlowError::NotMonotone { at: x, derivative: d });
            }
        }
        Ok(())
    }

    /// `g(x + 1) − g(x) − 1` sampled on the monotonicity grid.
    pub fn periodicity_defect(&self) -> f64 {
        (0..100)
            .map(|i| {
                let x = i as f64 / 100.0;
                (self.eval(x + 1.0) - self.eval(x) - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Mean and truncated real Fourier coefficients of equispaced samples.
pub(crate) fn fourier_coefficients(values: &[f64]) -> (f64, Vec<f64>, Vec<f64>) {
    let n = values.len();
    if n == 0 {
        return (0.0, Vec::new(), Vec::new());
    }
    let mut buf: Vec<Complex<f64>> = values.iter().map(|v| Complex::new(*v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let nf = n as f64;
    // The Nyquist mode is dropped so the interpolant stays real and symmetric.
    let kmax = (n - 1) / 2;
    let cos = (1..=kmax).map(|k| 2.0 * buf[k].re / nf).collect();
    let sin = (1..=kmax).map(|k| -2.0 * buf[k].im / nf).collect();
    (buf[0].re / nf, cos, sin)
}
