//! Franks conjugacies `h = id + w` with `h∘f = A∘h` and their regularity.
//!
//! The cohomological equation `A·w − w∘f = p`, with `p = F − A`, is split
//! along the eigenlines of `A`. The unstable coordinate is a forward
//! contraction and the stable one a backward contraction, both with factor
//! `1/|λ|`, so plain Jacobi sweeps on the grid converge geometrically.

mod grid;

pub use grid::GridFunction;

use std::collections::HashMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::exact_linalg::IntMatrix2;
use crate::hyperbolic::{self, HypError};
use crate::numeric::{self, Vec2};
use crate::torus_maps::{MapError, TorusLift};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConjError {
    #[error("iteration stalled at residual {residual:e} for {sweeps} sweeps")]
    NotContracting { residual: f64, sweeps: usize },
    #[error("cone criterion failed: {0}")]
    ConeCriterionFailed(String),
    #[error("oscillation data underflow: {0}")]
    DegenerateData(String),
    #[error("samples {a:?} and {b:?} have images within 1e-12")]
    NonInjectiveSample { a: Vec2, b: Vec2 },
    #[error("grid parse error: {0}")]
    Parse(String),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Map(#[from] MapError),
}

impl From<HypError> for ConjError {
    fn from(e: HypError) -> Self {
        match e {
            HypError::Map(m) => ConjError::Map(m),
            other => ConjError::ConeCriterionFailed(other.to_string()),
        }
    }
}

/// Sweeps without improvement before giving up.
pub const STALL_SWEEPS: usize = 50;
const MAX_SWEEPS: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjugacyResult {
    /// `w` with `h = id + w`.
    pub h: GridFunction,
    /// Sup over nodes of the two coordinate equations' residuals.
    pub residual_sup: f64,
    pub iterations: usize,
    pub holder_alpha_estimate: f64,
    /// Sup-norm change per sweep.
    pub residual_history: Vec<f64>,
    /// `|λ|` of the linear part.
    pub lambda: f64,
    pub min_jacobian_det: f64,
}

impl ConjugacyResult {
    /// Largest per-sweep ratio after the fifth sweep, ignoring the rounding floor.
    pub fn worst_contraction_ratio(&self) -> f64 {
        self.residual_history
            .windows(2)
            .skip(4)
            .filter(|w| w[0] > 1e-13)
            .map(|w| w[1] / w[0])
            .fold(0.0, f64::max)
    }
}

/// Unit eigenvectors and eigenvalues `(e_u, e_s, λ_u, λ_s)` of `A`.
fn eigenbasis(a: &IntMatrix2) -> Result<(Vec2, Vec2, f64, f64), ConjError> {
    let m = a.to_f64();
    let (ev, real) = numeric::eigenvalues(&m);
    if !real || ev[0].abs() <= 1.0 || a.det().abs() != 1 {
        return Err(ConjError::ConeCriterionFailed(format!("linear part {a} is not Anosov")));
    }
    Ok((numeric::eigenvector(&m, ev[0]), numeric::eigenvector(&m, ev[1]), ev[0], ev[1]))
}

/// Solves `h∘f = A∘h` on an `N × N` grid to sweep residual `tol`.
pub fn franks_conjugacy(f: &TorusLift, resolution: usize, tol: f64) -> Result<ConjugacyResult, ConjError> {
    if resolution < 4 || !(tol > 0.0) {
        return Err(ConjError::Invalid("resolution >= 4 and tol > 0 required".into()));
    }
    let a = f.linear_part();
    let (eu, es, lu, ls) = eigenbasis(&a)?;
    if !f.is_affine() {
        let rate = hyperbolic::expansion_rate(f, hyperbolic::EXPANSION_ORBITS, hyperbolic::EXPANSION_LENGTH, 0)?;
        if !(rate > 1.0) {
            return Err(ConjError::ConeCriterionFailed(format!("no uniform expansion (rate {rate})")));
        }
    }
    let am = a.to_f64();
    let basis_inv = numeric::mat_inv(&[[eu[0], es[0]], [eu[1], es[1]]]);
    let n = resolution;
    let p_of = |x: Vec2| -> Result<(Vec2, Vec2), MapError> {
        let y = f.eval(x)?;
        let p = numeric::sub(y, numeric::mat_vec(&am, x));
        Ok((numeric::mod1(y), numeric::mat_vec(&basis_inv, p)))
    };
    // Per node: f(x), p(x) in eigencoordinates, f⁻¹(x) and p(f⁻¹ x).
    let pre = (0..n * n)
        .into_par_iter()
        .map(|k| {
            let x = [(k % n) as f64 / n as f64, (k / n) as f64 / n as f64];
            let (fx, px) = p_of(x)?;
            let xi = f.inverse_eval(x)?;
            let (_, pxi) = p_of(xi)?;
            Ok((fx, px[0], numeric::mod1(xi), pxi[1]))
        })
        .collect::<Result<Vec<_>, MapError>>()?;
    let mut wu = vec![0.0; n * n];
    let mut ws = vec![0.0; n * n];
    let mut history = Vec::new();
    let mut best = f64::INFINITY;
    let mut stalled = 0;
    let mut residual = f64::INFINITY;
    while residual > tol {
        if history.len() >= MAX_SWEEPS {
            return Err(ConjError::NotContracting { residual, sweeps: history.len() });
        }
        let next: Vec<(f64, f64)> = pre
            .par_iter()
            .map(|(fx, pu, xi, psi)| {
                let u = (grid::bilinear(n, *fx, |k| wu[k]) + pu) / lu;
                let s = ls * grid::bilinear(n, *xi, |k| ws[k]) - psi;
                (u, s)
            })
            .collect();
        residual = next
            .iter()
            .zip(wu.iter().zip(&ws))
            .map(|((u, s), (u0, s0))| (u - u0).abs().max((s - s0).abs()))
            .fold(0.0, f64::max);
        for (k, (u, s)) in next.into_iter().enumerate() {
            wu[k] = u;
            ws[k] = s;
        }
        history.push(residual);
        if residual < best {
            best = residual;
            stalled = 0;
        } else {
            stalled += 1;
            if stalled >= STALL_SWEEPS {
                return Err(ConjError::NotContracting { residual, sweeps: stalled });
            }
        }
    }
    let h = GridFunction {
        resolution: n,
        values: wu.iter().zip(&ws).map(|(u, s)| numeric::add(numeric::scale(*u, eu), numeric::scale(*s, es))).collect(),
    };
    let scales: Vec<usize> = (0..5).map(|k| 1usize << k).filter(|k| *k < n / 2).collect();
    let holder = match holder_exponent_estimate(&h, &scales) {
        Ok(a) => a,
        Err(ConjError::DegenerateData(_)) | Err(ConjError::Invalid(_)) => 1.0,
        Err(e) => return Err(e),
    };
    Ok(ConjugacyResult {
        min_jacobian_det: h.min_jacobian_det(),
        h,
        residual_sup: residual,
        iterations: history.len(),
        holder_alpha_estimate: holder,
        residual_history: history,
        lambda: lu.abs(),
    })
}

/// `sup |h(f x) − A h(x)|` mod `Z^2` over grid nodes and random off-grid points.
pub fn conjugacy_residual(h: &GridFunction, f: &TorusLift, a: &IntMatrix2, n_offgrid: usize, seed: u64) -> Result<f64, ConjError> {
    let am = a.to_f64();
    let n = h.resolution;
    let at = |x: Vec2| -> Result<f64, ConjError> {
        let y = f.eval(x)?;
        let lhs = numeric::add(y, h.eval(y));
        let rhs = numeric::mat_vec(&am, numeric::add(x, h.eval(x)));
        Ok(numeric::norm(numeric::wrap_centered(numeric::sub(lhs, rhs))))
    };
    let nodes = (0..n * n).into_par_iter().map(|k| at([(k % n) as f64 / n as f64, (k / n) as f64 / n as f64]));
    let off = (0..n_offgrid).into_par_iter().map(|i| {
        let mut rng = numeric::indexed_rng(seed, i as u64);
        at([rng.gen::<f64>(), rng.gen::<f64>()])
    });
    nodes.chain(off).try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

/// Least-squares slope of `log osc(w, s)` against `log s` over grid steps
/// `scales`, clamped to `(0, 1]`. A vanishing `w` counts as Lipschitz.
pub fn holder_exponent_estimate(h: &GridFunction, scales: &[usize]) -> Result<f64, ConjError> {
    if scales.len() < 3 || scales.iter().any(|s| *s == 0 || *s >= h.resolution) {
        return Err(ConjError::Invalid("need at least 3 scales strictly inside the grid".into()));
    }
    let osc: Vec<f64> = scales.iter().map(|&k| h.oscillation(k)).collect();
    if osc.iter().all(|o| *o == 0.0) {
        return Ok(1.0);
    }
    if osc.iter().any(|o| *o < 1e-300) {
        return Err(ConjError::DegenerateData(format!("oscillations {osc:?}")));
    }
    let xs: Vec<f64> = scales.iter().map(|&k| (k as f64 / h.resolution as f64).ln()).collect();
    let ys: Vec<f64> = osc.iter().map(|o| o.ln()).collect();
    let (slope, _) = numeric::linear_fit(&xs, &ys);
    Ok(slope.clamp(1e-9, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeCheck {
    /// `max_bins |count / expected − 1|`.
    pub max_bin_deviation: f64,
    /// One-sigma relative noise per bin under uniformity.
    pub noise_sigma: f64,
    pub min_jacobian_det: f64,
}

/// Histogram of `h(x)` for uniform `x` on a `bins × bins` partition.
pub fn pushforward_volume_check(h: &GridFunction, bins: usize, n_samples: usize, seed: u64) -> Result<VolumeCheck, ConjError> {
    if bins == 0 || n_samples < bins * bins {
        return Err(ConjError::Invalid("need bins >= 1 and at least one sample per bin".into()));
    }
    let min_det = h.min_jacobian_det();
    if min_det <= 0.0 {
        return Err(ConjError::Invalid(format!("id + w is not a local diffeomorphism (det {min_det})")));
    }
    let samples: Vec<(Vec2, Vec2)> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = numeric::indexed_rng(seed, i as u64);
            let x = [rng.gen::<f64>(), rng.gen::<f64>()];
            (x, numeric::mod1(numeric::add(x, h.eval(x))))
        })
        .collect();
    let cell = 1e-12;
    let key = |y: Vec2| ((y[0] / cell).floor() as i64, (y[1] / cell).floor() as i64);
    let mut seen: HashMap<(i64, i64), usize> = HashMap::with_capacity(n_samples);
    let mut counts = vec![0usize; bins * bins];
    for (idx, (x, y)) in samples.iter().enumerate() {
        let (kx, ky) = key(*y);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(&other) = seen.get(&(kx + dx, ky + dy)) {
                    let (ox, oy) = samples[other];
                    if numeric::torus_dist(oy, *y) < cell && numeric::torus_dist(ox, *x) >= cell {
                        return Err(ConjError::NonInjectiveSample { a: ox, b: *x });
                    }
                }
            }
        }
        seen.insert((kx, ky), idx);
        let bx = ((y[0] * bins as f64) as usize).min(bins - 1);
        let by = ((y[1] * bins as f64) as usize).min(bins - 1);
        counts[by * bins + bx] += 1;
    }
    let expected = n_samples as f64 / (bins * bins) as f64;
    let max_bin_deviation = counts.iter().map(|c| (*c as f64 / expected - 1.0).abs()).fold(0.0, f64::max);
    Ok(VolumeCheck { max_bin_deviation, noise_sigma: 1.0 / expected.sqrt(), min_jacobian_det: min_det })
}
