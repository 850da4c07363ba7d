use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::HypError;
use crate::numeric::{self, Mat2, Vec2};
use crate::torus_maps::{stratified_point, TorusLift};

/// Unstable and stable unit eigenvectors of the linear part.
pub fn linear_directions(f: &TorusLift) -> Result<(Vec2, Vec2, f64), HypError> {
    let a = f.linear_part();
    let m = a.to_f64();
    let (ev, real) = numeric::eigenvalues(&m);
    if !real || ev[0].abs() <= 1.0 + 1e-12 || a.det().abs() != 1 {
        return Err(HypError::ConeCriterionFailed(format!("linear part {a} is not hyperbolic")));
    }
    Ok((orient(numeric::eigenvector(&m, ev[0])), orient(numeric::eigenvector(&m, ev[1])), ev[0]))
}

/// Sign convention: first nonzero coordinate positive.
pub(crate) fn orient(v: Vec2) -> Vec2 {
    if v[0] < 0.0 || (v[0] == 0.0 && v[1] < 0.0) {
        [-v[0], -v[1]]
    } else {
        v
    }
}

/// `E_u(x)` from the last `depth` and `depth - 1` steps of a backward orbit.
pub fn unstable_direction_pair(f: &TorusLift, x: Vec2, depth: usize) -> Result<(Vec2, Vec2), HypError> {
    let (eu, _, _) = linear_directions(f)?;
    let mut orbit = Vec::with_capacity(depth + 1);
    orbit.push(x);
    for k in 1..=depth {
        orbit.push(numeric::mod1(f.inverse_eval(orbit[k - 1])?));
    }
    let push = |start: usize| -> Result<Vec2, HypError> {
        let mut v = eu;
        for k in (1..=start).rev() {
            let (_, j) = f.eval_jac(orbit[k])?;
            v = numeric::normalize(numeric::mat_vec(&j, v));
        }
        Ok(orient(v))
    };
    Ok((push(depth)?, push(depth.saturating_sub(1))?))
}

/// `E_s(x)` from the forward orbit, pulled back with inverse Jacobians.
pub fn stable_direction_pair(f: &TorusLift, x: Vec2, depth: usize) -> Result<(Vec2, Vec2), HypError> {
    let (_, es, _) = linear_directions(f)?;
    let mut orbit = Vec::with_capacity(depth + 1);
    orbit.push(x);
    let mut jacs: Vec<Mat2> = Vec::with_capacity(depth);
    for k in 0..depth {
        let (y, j) = f.eval_jac(orbit[k])?;
        jacs.push(numeric::mat_inv(&j));
        orbit.push(numeric::mod1(y));
    }
    let pull = |start: usize| {
        let mut v = es;
        for j in jacs[..start].iter().rev() {
            v = numeric::normalize(numeric::mat_vec(j, v));
        }
        orient(v)
    };
    Ok((pull(depth), pull(depth.saturating_sub(1))))
}

pub fn unstable_direction(f: &TorusLift, x: Vec2, depth: usize) -> Result<Vec2, HypError> {
    unstable_direction_pair(f, x, depth).map(|p| p.0)
}

pub fn stable_direction(f: &TorusLift, x: Vec2, depth: usize) -> Result<Vec2, HypError> {
    stable_direction_pair(f, x, depth).map(|p| p.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplittingField {
    pub resolution: usize,
    pub iteration_depth: usize,
    /// Row-major over nodes `(i/N, j/N)`, index `j*N + i`.
    pub e_u: Vec<Vec2>,
    pub e_s: Vec<Vec2>,
    /// Largest angle change between depth and depth - 1.
    pub defect: f64,
    /// Smallest angle between `E_u` and `E_s` over the grid.
    pub min_angle: f64,
    /// Smallest per-step growth of unstable vectors along sampled orbits.
    pub expansion_rate: f64,
}

impl SplittingField {
    pub fn node(&self, i: usize, j: usize) -> Vec2 {
        [i as f64 / self.resolution as f64, j as f64 / self.resolution as f64]
    }
}

/// Orbits and length used for the expansion certificate.
pub const EXPANSION_ORBITS: usize = 100;
pub const EXPANSION_LENGTH: usize = 50;

/// Smallest geometric-mean growth `|Df^n v|^(1/n)` over sampled orbits.
pub fn expansion_rate(f: &TorusLift, n_orbits: usize, length: usize, seed: u64) -> Result<f64, HypError> {
    let (eu, _, _) = linear_directions(f)?;
    let side = (n_orbits as f64).sqrt().ceil() as usize;
    let rates = (0..n_orbits)
        .into_par_iter()
        .map(|i| {
            let mut x = stratified_point(seed, i, side);
            // Settle onto the unstable cone before measuring.
            let mut v = eu;
            for _ in 0..10 {
                let (y, j) = f.eval_jac(x)?;
                v = numeric::normalize(numeric::mat_vec(&j, v));
                x = numeric::mod1(y);
            }
            let mut log_growth = numeric::Kahan::new();
            for _ in 0..length {
                let (y, j) = f.eval_jac(x)?;
                let w = numeric::mat_vec(&j, v);
                let n = numeric::norm(w);
                log_growth.add(n.ln());
                v = numeric::scale(1.0 / n, w);
                x = numeric::mod1(y);
            }
            Ok((log_growth.value() / length as f64).exp())
        })
        .collect::<Result<Vec<f64>, HypError>>()?;
    Ok(rates.into_iter().fold(f64::INFINITY, f64::min))
}

/// Stable/unstable fields on an `N × N` grid by cone iteration.
pub fn compute_splitting(f: &TorusLift, resolution: usize, depth: usize) -> Result<SplittingField, HypError> {
    if resolution == 0 || depth < 2 {
        return Err(HypError::Invalid("resolution >= 1 and depth >= 2 required".into()));
    }
    linear_directions(f)?;
    let rate = expansion_rate(f, EXPANSION_ORBITS, EXPANSION_LENGTH, 0)?;
    if !(rate > 1.0) {
        return Err(HypError::ConeCriterionFailed(format!("no uniform expansion observed (rate {rate})")));
    }
    let n = resolution;
    let rows = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let x = [(idx % n) as f64 / n as f64, (idx / n) as f64 / n as f64];
            let (u, u1) = unstable_direction_pair(f, x, depth)?;
            let (s, s1) = stable_direction_pair(f, x, depth)?;
            Ok((u, s, numeric::line_angle(u, u1).max(numeric::line_angle(s, s1)), numeric::line_angle(u, s)))
        })
        .collect::<Result<Vec<_>, HypError>>()?;
    let defect = rows.iter().map(|r| r.2).fold(0.0, f64::max);
    let min_angle = rows.iter().map(|r| r.3).fold(f64::INFINITY, f64::min);
    if min_angle < 1e-9 {
        return Err(HypError::ConeCriterionFailed(format!("E_u and E_s nearly parallel (angle {min_angle})")));
    }
    Ok(SplittingField {
        resolution: n,
        iteration_depth: depth,
        e_u: rows.iter().map(|r| r.0).collect(),
        e_s: rows.iter().map(|r| r.1).collect(),
        defect,
        min_angle,
        expansion_rate: rate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_splitting_is_exact() {
        let f = TorusLift::cat();
        let s = compute_splitting(&f, 8, 20).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let eu = numeric::normalize([1.0, 1.0 / phi]);
        for v in &s.e_u {
            assert!(numeric::line_angle(*v, eu) < 1e-12);
        }
        assert!(s.defect < 1e-12);
        assert!(s.expansion_rate > (phi * phi) - 0.1 - 1e-9);
    }

    #[test]
    fn perturbed_splitting_is_consistent() {
        let f = TorusLift::cat_shear(0.05);
        let s = compute_splitting(&f, 16, 40).unwrap();
        assert!(s.defect < 1e-8, "defect {}", s.defect);
        let mut worst: f64 = 0.0;
        for j in 0..4 {
            for i in 0..4 {
                let x = s.node(i * 4, j * 4);
                let (fx, df) = f.eval_jac(x).unwrap();
                let pushed = numeric::mat_vec(&df, s.e_u[j * 4 * 16 + i * 4]);
                let target = unstable_direction(&f, numeric::mod1(fx), 40).unwrap();
                worst = worst.max(numeric::line_angle(pushed, target));
            }
        }
        assert!(worst < 10.0 * s.defect.max(1e-15), "{worst}");
        let eu0 = linear_directions(&f).unwrap().0;
        assert!(s.e_u.iter().any(|v| numeric::line_angle(*v, eu0) > 1e-4));
    }

    #[test]
    fn identity_fails_cone_criterion() {
        assert!(matches!(compute_splitting(&TorusLift::identity(), 4, 10), Err(HypError::ConeCriterionFailed(_))));
    }
}
