//! Lyapunov exponents, the entropy inequality, Cesàro-averaged measures and
//! derivative and distortion scans for `Z^2` actions.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::exact_linalg::IntMatrix2;
use crate::hyperbolic::{self, HypError};
use crate::numeric::{self, Mat2, Vec2};
use crate::torus_maps::{MapError, TorusLift};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ErgodicError {
    #[error("B^{n} e needs {compositions} compositions, above the 10^6 guard")]
    OverflowGuard { n: usize, compositions: u128 },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Hyperbolic(#[from] HypError),
}

/// Largest number of generator compositions per group element.
pub const COMPOSITION_GUARD: u128 = 1_000_000;
const BURN_IN: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LyapunovEstimate {
    pub lambda1: f64,
    pub n_orbits: usize,
    pub orbit_length: usize,
    /// Standard deviation of the per-orbit estimates.
    pub spread: f64,
}

/// Mean log growth of a tangent vector along Lebesgue-uniform orbits.
pub fn lyapunov_exponent(f: &TorusLift, n_orbits: usize, orbit_length: usize, seed: u64) -> Result<LyapunovEstimate, ErgodicError> {
    if n_orbits == 0 || orbit_length == 0 {
        return Err(ErgodicError::Invalid("need at least one orbit of positive length".into()));
    }
    let per_orbit = (0..n_orbits)
        .into_par_iter()
        .map(|i| {
            let mut rng = numeric::indexed_rng(seed, i as u64);
            let mut x = [rng.gen::<f64>(), rng.gen::<f64>()];
            let mut v = numeric::normalize([rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5]);
            for _ in 0..BURN_IN {
                let (y, j) = f.eval_jac(x)?;
                v = numeric::normalize(numeric::mat_vec(&j, v));
                x = numeric::mod1(y);
            }
            let mut acc = numeric::Kahan::new();
            for _ in 0..orbit_length {
                let (y, j) = f.eval_jac(x)?;
                let w = numeric::mat_vec(&j, v);
                let n = numeric::norm(w);
                acc.add(n.ln());
                v = numeric::scale(1.0 / n, w);
                x = numeric::mod1(y);
            }
            Ok(acc.value() / orbit_length as f64)
        })
        .collect::<Result<Vec<f64>, MapError>>()?;
    let (mean, std) = numeric::mean_std(&per_orbit);
    Ok(LyapunovEstimate { lambda1: mean, n_orbits, orbit_length, spread: std })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyCheck {
    /// `log|λ_A|`, the topological entropy of the linear model.
    pub lhs: f64,
    /// Measured unstable exponent standing in for the metric entropy.
    pub rhs: f64,
    pub spread: f64,
    pub holds: bool,
}

/// `log|λ_A| ≥ λ₁ − 3·spread`, with `1e-12` slack for rounding.
pub fn entropy_inequality_check(a: &IntMatrix2, est: &LyapunovEstimate) -> Result<EntropyCheck, ErgodicError> {
    let (ev, real) = numeric::eigenvalues(&a.to_f64());
    if !real || ev[0].abs() <= 1.0 {
        return Err(ErgodicError::Invalid(format!("{a} is not hyperbolic")));
    }
    let lhs = ev[0].abs().ln();
    Ok(EntropyCheck { lhs, rhs: est.lambda1, spread: est.spread, holds: lhs >= est.lambda1 - 3.0 * est.spread - 1e-12 })
}

/// Weighted points on the torus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureCloud {
    pub points: Vec<Vec2>,
    pub weights: Vec<f64>,
    pub provenance: String,
}

impl MeasureCloud {
    pub fn uniform_weights(points: Vec<Vec2>, provenance: impl Into<String>) -> Self {
        let w = 1.0 / points.len().max(1) as f64;
        MeasureCloud { weights: vec![w; points.len()], points, provenance: provenance.into() }
    }

    pub fn dirac(x: Vec2) -> Self {
        MeasureCloud::uniform_weights(vec![numeric::mod1(x)], format!("dirac at {x:?}"))
    }

    /// Forward orbit of `f` from `x0` after a burn-in, a proxy for its SRB measure.
    pub fn birkhoff(f: &TorusLift, x0: Vec2, n_samples: usize) -> Result<Self, ErgodicError> {
        let mut x = x0;
        for _ in 0..BURN_IN {
            x = numeric::mod1(f.eval(x)?);
        }
        let mut pts = Vec::with_capacity(n_samples);
        for _ in 0..n_samples {
            pts.push(x);
            x = numeric::mod1(f.eval(x)?);
        }
        Ok(MeasureCloud::uniform_weights(pts, format!("forward Birkhoff orbit of length {n_samples}")))
    }

    /// Mass per bin, row-major with `bins × bins` cells.
    pub fn histogram(&self, bins: usize) -> Vec<f64> {
        let mut h = vec![0.0; bins * bins];
        for (p, w) in self.points.iter().zip(&self.weights) {
            let q = numeric::mod1(*p);
            let i = ((q[0] * bins as f64) as usize).min(bins - 1);
            let j = ((q[1] * bins as f64) as usize).min(bins - 1);
            h[j * bins + i] += w;
        }
        h
    }

    /// `Σ |mass − 1/bins²|` over bins.
    pub fn deviation_from_uniform(&self, bins: usize) -> f64 {
        let u = 1.0 / (bins * bins) as f64;
        self.histogram(bins).iter().map(|m| (m - u).abs()).sum()
    }

    pub fn histogram_distance(&self, other: &MeasureCloud, bins: usize) -> f64 {
        self.histogram(bins).iter().zip(other.histogram(bins)).map(|(a, b)| (a - b).abs()).sum()
    }

    pub fn total_weight(&self) -> f64 {
        numeric::kahan_sum(self.weights.iter().copied())
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,y,weight\n");
        for (p, w) in self.points.iter().zip(&self.weights) {
            s.push_str(&format!("{:e},{:e},{:e}\n", p[0], p[1], w));
        }
        s
    }
}

/// A `Z^2` action by torus maps `v ↦ Φ(v)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Z2Action {
    /// `Φ(v) = x + ρ v`.
    Affine { rho: Mat2 },
    /// `Φ(v) = φ ∘ (x + ρ v) ∘ φ⁻¹`.
    Conjugated { rho: Mat2, phi: TorusLift },
    /// `Φ(v) = Φ(e₁)^{v₁} Φ(e₂)^{v₂}` by composition.
    Generic { e1: TorusLift, e2: TorusLift },
}

/// Exact `Bⁿ v`.
fn power_vector(b: &IntMatrix2, n: usize, v: [i64; 2]) -> Result<[i64; 2], ErgodicError> {
    let p = b.checked_pow(n as i64).ok_or(ErgodicError::OverflowGuard { n, compositions: u128::MAX })?;
    let m = p.0;
    let x = (m[0][0] as i128) * v[0] as i128 + (m[0][1] as i128) * v[1] as i128;
    let y = (m[1][0] as i128) * v[0] as i128 + (m[1][1] as i128) * v[1] as i128;
    match (i64::try_from(x), i64::try_from(y)) {
        (Ok(x), Ok(y)) => Ok([x, y]),
        _ => Err(ErgodicError::OverflowGuard { n, compositions: u128::MAX }),
    }
}

/// `ρ w mod 1`, reducing each product before summing.
fn translation(rho: &Mat2, w: [i64; 2]) -> Vec2 {
    let part = |r: f64, k: i64| (r * k as f64).rem_euclid(1.0);
    numeric::mod1([part(rho[0][0], w[0]) + part(rho[0][1], w[1]), part(rho[1][0], w[0]) + part(rho[1][1], w[1])])
}

impl Z2Action {
    /// Applies `Φ(w)` with its Jacobian.
    pub fn apply(&self, w: [i64; 2], x: Vec2, n: usize) -> Result<(Vec2, Mat2), ErgodicError> {
        match self {
            Z2Action::Affine { rho } => Ok((numeric::mod1(numeric::add(x, translation(rho, w))), numeric::IDENTITY2)),
            Z2Action::Conjugated { rho, phi } => {
                let (z, ji) = phi.inverse_eval_jac(x)?;
                let (y, jp) = phi.eval_jac(numeric::add(z, translation(rho, w)))?;
                Ok((numeric::mod1(y), numeric::mat_mul(&jp, &ji)))
            }
            Z2Action::Generic { e1, e2 } => {
                let count = w[0].unsigned_abs() as u128 + w[1].unsigned_abs() as u128;
                if count > COMPOSITION_GUARD {
                    return Err(ErgodicError::OverflowGuard { n, compositions: count });
                }
                let mut y = x;
                let mut j = numeric::IDENTITY2;
                for (g, k) in [(e2, w[1]), (e1, w[0])] {
                    for _ in 0..k.unsigned_abs() {
                        let (z, d) = if k > 0 { g.eval_jac(y)? } else { g.inverse_eval_jac(y)? };
                        y = numeric::mod1(z);
                        j = numeric::mat_mul(&d, &j);
                    }
                }
                Ok((y, j))
            }
        }
    }
}

/// Cesàro cloud `(1/N) Σ_{n=1}^{N} Φ(Bⁿ e₁)_* μ`.
pub fn srb_average(action: &Z2Action, b: &IntMatrix2, n: usize, initial: &MeasureCloud) -> Result<MeasureCloud, ErgodicError> {
    if n == 0 {
        return Err(ErgodicError::Invalid("N must be positive".into()));
    }
    let words = (1..=n).map(|k| power_vector(b, k, [1, 0]).map(|w| (k, w))).collect::<Result<Vec<_>, _>>()?;
    let pushed = words
        .par_iter()
        .map(|&(k, w)| initial.points.iter().map(|p| action.apply(w, *p, k).map(|r| r.0)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    let mut points = Vec::with_capacity(n * initial.points.len());
    let mut weights = Vec::with_capacity(points.capacity());
    for pts in pushed {
        points.extend(pts);
        weights.extend(initial.weights.iter().map(|w| w / n as f64));
    }
    Ok(MeasureCloud { points, weights, provenance: format!("Cesàro average over B^n e1, n = 1..={n}, of [{}]", initial.provenance) })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivativeScan {
    /// `max(max D^u, 1/min D^u)` over grid and `n`.
    pub k: f64,
    /// `(n, min, max)` of the unstable derivative.
    pub per_n: Vec<(usize, f64, f64)>,
    /// `K` at `n_max` exceeds 1.5 times `K` at `n_max/2`.
    pub growing: bool,
}

fn grid_points(side: usize) -> Vec<Vec2> {
    (0..side * side).map(|k| [((k % side) as f64 + 0.5) / side as f64, ((k / side) as f64 + 0.5) / side as f64]).collect()
}

const SPLITTING_DEPTH: usize = 30;

/// Extremes of `|DΦ(Bⁿ v)(x) E_u(x)|` over a grid and `n = 1..=n_max`.
pub fn derivative_bound_scan(
    f: &TorusLift,
    action: &Z2Action,
    b: &IntMatrix2,
    v: [i64; 2],
    n_max: usize,
    grid: usize,
) -> Result<DerivativeScan, ErgodicError> {
    if n_max == 0 || grid == 0 {
        return Err(ErgodicError::Invalid("need n_max >= 1 and grid >= 1".into()));
    }
    let pts = grid_points(grid);
    let eu = pts.par_iter().map(|x| hyperbolic::unstable_direction(f, *x, SPLITTING_DEPTH)).collect::<Result<Vec<_>, _>>()?;
    let mut per_n = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let w = power_vector(b, n, v)?;
        let vals = pts
            .par_iter()
            .zip(&eu)
            .map(|(x, e)| action.apply(w, *x, n).map(|(_, j)| numeric::norm(numeric::mat_vec(&j, *e))))
            .collect::<Result<Vec<f64>, _>>()?;
        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().copied().fold(0.0, f64::max);
        per_n.push((n, lo, hi));
    }
    let k_of = |upto: usize| per_n[..upto].iter().map(|(_, lo, hi)| hi.max(1.0 / lo)).fold(1.0, f64::max);
    let k = k_of(n_max);
    let growing = n_max >= 2 && k > 1.5 * k_of(n_max / 2);
    Ok(DerivativeScan { k, per_n, growing })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistortionScan {
    pub alpha: f64,
    /// Least `C` with `|log(D^u_x / D^u_y)| ≤ C |x − y|^{α²}` on the samples.
    pub c: f64,
    pub worst_pair: Option<(Vec2, Vec2, usize)>,
}

/// Moves `x` a signed arclength `s` along the unstable field of `f`.
fn along_leaf(f: &TorusLift, x: Vec2, s: f64, steps: usize) -> Result<Vec2, ErgodicError> {
    let h = s / steps as f64;
    let mut y = x;
    let mut prev = hyperbolic::unstable_direction(f, x, SPLITTING_DEPTH)?;
    for _ in 0..steps {
        let align = |v: Vec2| if numeric::dot(v, prev) < 0.0 { numeric::scale(-1.0, v) } else { v };
        let mid = numeric::add(y, numeric::scale(h / 2.0, prev));
        let e = align(hyperbolic::unstable_direction(f, numeric::mod1(mid), SPLITTING_DEPTH)?);
        y = numeric::add(y, numeric::scale(h, e));
        prev = align(hyperbolic::unstable_direction(f, numeric::mod1(y), SPLITTING_DEPTH)?);
    }
    Ok(y)
}

/// Distortion constant over pairs on common local unstable leaves.
pub fn distortion_scan(
    f: &TorusLift,
    action: &Z2Action,
    b: &IntMatrix2,
    v: [i64; 2],
    alpha: f64,
    ns: &[usize],
    pair_samples: usize,
    seed: u64,
) -> Result<DistortionScan, ErgodicError> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(ErgodicError::Invalid("alpha must lie in (0, 1]".into()));
    }
    let pairs = (0..pair_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = numeric::indexed_rng(seed, i as u64);
            let x = [rng.gen::<f64>(), rng.gen::<f64>()];
            let s = rng.gen_range(1e-3..0.05) * if rng.gen::<bool>() { 1.0 } else { -1.0 };
            let y = numeric::mod1(along_leaf(f, x, s, 8)?);
            Ok((x, y))
        })
        .collect::<Result<Vec<_>, ErgodicError>>()?;
    let mut c: f64 = 0.0;
    let mut worst = None;
    for &n in ns {
        let w = power_vector(b, n, v)?;
        for &(x, y) in &pairs {
            let du = |p: Vec2| -> Result<f64, ErgodicError> {
                let e = hyperbolic::unstable_direction(f, p, SPLITTING_DEPTH)?;
                let (_, j) = action.apply(w, p, n)?;
                Ok(numeric::norm(numeric::mat_vec(&j, e)))
            };
            let ratio = (du(x)? / du(y)?).ln().abs();
            let d = numeric::torus_dist(x, y);
            let bound = ratio / d.powf(alpha * alpha);
            if bound > c {
                c = bound;
                worst = Some((x, y, n));
            }
        }
    }
    Ok(DistortionScan { alpha, c, worst_pair: worst })
}
