use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::circle::{fourier_coefficients, CircleFamily, CircleLift, MONOTONE_GRID};
use super::FlowError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationNumber {
    pub rho: f64,
    /// `|rho − ρ(g)| ≤ error_bound`.
    pub error_bound: f64,
    pub iterates: usize,
}

/// `(gⁿ(x0) − x0)/n` with the monotone-lift enclosure `1/n`. When the
/// displacement reaches an integer `k` the map has a lifted fixed point
/// and `rho = k` exactly.
pub fn rotation_number(g: &CircleLift, n: usize, x0: f64) -> Result<RotationNumber, FlowError> {
    if n == 0 {
        return Err(FlowError::Invalid("n must be positive".into()));
    }
    g.check_monotone()?;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..=MONOTONE_GRID {
        let d = g.displacement(i as f64 / MONOTONE_GRID as f64).0;
        lo = lo.min(d);
        hi = hi.max(d);
    }
    let k = lo.ceil();
    if k <= hi {
        return Ok(RotationNumber { rho: k, error_bound: 0.0, iterates: 0 });
    }
    // Integer part kept apart so the orbit stays in [0, 1).
    let start = x0.floor();
    let mut frac = x0 - start;
    let mut whole: i64 = 0;
    for _ in 0..n {
        let y = g.eval(frac);
        let fl = y.floor();
        whole += fl as i64;
        frac = y - fl;
    }
    let rho = (whole as f64 + (frac - (x0 - start))) / n as f64;
    Ok(RotationNumber { rho, error_bound: 1.0 / n as f64, iterates: n })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleConjugacy {
    /// `h = id + η` with `h∘g_τ = h + rho`, `g_τ = g + tau`.
    pub h: CircleLift,
    pub rho: f64,
    /// Translation absorbing the mismatch between `ρ(g)` and `rho`.
    pub tau: f64,
    /// `sup |h(g_τ(x)) − h(x) − rho|` on a fine grid.
    pub defect: f64,
    pub iterations: usize,
    pub defect_history: Vec<f64>,
}

impl CircleConjugacy {
    /// The conjugated map `g + tau`.
    pub fn adjusted(&self, g: &CircleLift) -> CircleLift {
        g.translated(self.tau)
    }
}

fn defect_of(h: &CircleLift, g: &CircleLift, rho: f64, grid: usize) -> f64 {
    (0..grid)
        .map(|i| {
            let x = (i as f64 + 0.5) / grid as f64;
            (h.eval(g.eval(x)) - h.eval(x) - rho).abs()
        })
        .fold(0.0, f64::max)
}

/// KAM Newton iteration for `h∘(g + τ)∘h⁻¹ = R_rho` with `n_modes`
/// Fourier modes for `h − id`.
pub fn circle_conjugacy(g: &CircleLift, rho: f64, n_modes: usize, n_iters: usize) -> Result<CircleConjugacy, FlowError> {
    if n_modes == 0 || n_iters == 0 {
        return Err(FlowError::Invalid("need at least one mode and one iteration".into()));
    }
    for k in 1..=n_modes {
        let phase = 2.0 * PI * k as f64 * rho;
        let div = Complex::new(phase.cos() - 1.0, phase.sin()).norm();
        if div < 1e-12 {
            return Err(FlowError::SmallDivisorOverflow { k, divisor: div });
        }
    }
    let rn = rotation_number(g, 10_000, 0.0)?;
    // The translation absorbs the remaining mismatch; a large one means the wrong target.
    if (rn.rho - rho).abs() > rn.error_bound + 0.01 {
        return Err(FlowError::RotationMismatch { measured: rn.rho, target: rho, bound: rn.error_bound });
    }
    let m = 4 * n_modes;
    let fine = 2 * m;
    let mut h = CircleLift { family: CircleFamily::Sampled, shift: 0.0, cos: vec![0.0; n_modes], sin: vec![0.0; n_modes] };
    let mut tau = 0.0;
    let mut best: Option<(f64, CircleLift, f64)> = None;
    let mut history = Vec::new();
    for _ in 0..n_iters {
        let gt = g.translated(tau);
        let defect = defect_of(&h, &gt, rho, fine);
        history.push(defect);
        if best.as_ref().is_none_or(|b| defect < b.0) {
            best = Some((defect, h.clone(), tau));
        }
        if defect < 1e-14 {
            break;
        }
        // Error of the conjugated map G = h g_τ h⁻¹ on the sample grid.
        let e: Vec<f64> = (0..m)
            .map(|j| {
                let y = j as f64 / m as f64;
                h.eval(gt.eval(h.inverse(y))) - y - rho
            })
            .collect();
        let (mean, ec, es) = fourier_coefficients(&e);
        tau -= mean;
        let mut eta = CircleLift { family: CircleFamily::Sampled, shift: 0.0, cos: vec![0.0; n_modes], sin: vec![0.0; n_modes] };
        for k in 1..=n_modes.min(ec.len()) {
            // η(y + ρ) − η(y) = −e(y), mode by mode in complex form.
            let ek = Complex::new(ec[k - 1], -es[k - 1]) * 0.5;
            let phase = 2.0 * PI * k as f64 * rho;
            let eta_k = -ek / Complex::new(phase.cos() - 1.0, phase.sin());
            eta.cos[k - 1] = 2.0 * eta_k.re;
            eta.sin[k - 1] = -2.0 * eta_k.im;
        }
        // h ← (id + η)∘h, resampled and truncated.
        let samples: Vec<f64> = (0..m)
            .map(|j| {
                let x = j as f64 / m as f64;
                let hx = h.eval(x);
                hx + eta.displacement(hx).0 - x
            })
            .collect();
        let (_, c, s) = fourier_coefficients(&samples);
        h.cos = c.into_iter().take(n_modes).collect();
        h.sin = s.into_iter().take(n_modes).collect();
        h.cos.resize(n_modes, 0.0);
        h.sin.resize(n_modes, 0.0);
        if h.check_monotone().is_err() {
            break;
        }
    }
    let (defect, h, tau) = best.expect("at least one iteration");
    Ok(CircleConjugacy { iterations: history.len(), defect_history: history, h, rho, tau, defect })
}
