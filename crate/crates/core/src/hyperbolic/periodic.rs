use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::HypError;
use crate::exact_linalg::IntMatrix2;
use crate::numeric::{self, Mat2, Vec2};
use crate::torus_maps::TorusLift;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicPoint {
    /// Representative in `[0,1)^2`.
    pub x: Vec2,
    /// `F^q(x) = x + k`.
    pub k: [i64; 2],
    /// Eigenvalues of `DF^q(x)`, larger modulus first.
    pub eigenvalues: [f64; 2],
    pub period: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicSearch {
    pub points: Vec<PeriodicPoint>,
    /// Seeds whose Newton solve diverged.
    pub diverged: Vec<Vec2>,
}

/// `F^q(x)` and `DF^q(x)`.
pub fn iterate_jac(f: &TorusLift, x: Vec2, q: usize) -> Result<(Vec2, Mat2), HypError> {
    let mut y = x;
    let mut j = numeric::IDENTITY2;
    for _ in 0..q {
        let (z, d) = f.eval_jac(y)?;
        j = numeric::mat_mul(&d, &j);
        y = z;
    }
    Ok((y, j))
}

/// Exact solutions of `(A^q - I) x ∈ Z^2` in `[0,1)^2` with their `k`.
pub fn linear_periodic_seeds(a: &IntMatrix2, q: usize) -> Result<Vec<(Vec2, [i64; 2])>, HypError> {
    let aq = a.checked_pow(q as i64).ok_or_else(|| HypError::Invalid("A^q overflows".into()))?;
    let m = IntMatrix2::new(aq.0[0][0] - 1, aq.0[0][1], aq.0[1][0], aq.0[1][1] - 1);
    let det = m.det();
    if det == 0 {
        return Err(HypError::ConeCriterionFailed(format!("A^{q} - I is singular")));
    }
    let d = det.abs();
    if d > 1 << 20 {
        return Err(HypError::Invalid(format!("{d} periodic points is beyond the enumeration budget")));
    }
    let adj = m.adjugate();
    let sign = det.signum();
    let mut nums = BTreeSet::new();
    // x = adj·k / det; k mod d covers every class.
    for k0 in 0..d {
        for k1 in 0..d {
            let n = adj.apply([k0, k1]);
            nums.insert([(sign * n[0]).rem_euclid(d), (sign * n[1]).rem_euclid(d)]);
        }
    }
    Ok(nums
        .into_iter()
        .map(|n| {
            let mk = m.apply(n);
            ([n[0] as f64 / d as f64, n[1] as f64 / d as f64], [mk[0] / d, mk[1] / d])
        })
        .collect())
}

/// Points with `F^q(x) = x + k`, continued by Newton from the linear seeds.
pub fn periodic_points(f: &TorusLift, q: usize, k_bound: Option<i64>) -> Result<PeriodicSearch, HypError> {
    if q == 0 {
        return Err(HypError::Invalid("period must be positive".into()));
    }
    let seeds = linear_periodic_seeds(&f.linear_part(), q)?;
    let mut points: Vec<PeriodicPoint> = Vec::new();
    let mut diverged = Vec::new();
    for (seed, k) in seeds {
        if let Some(b) = k_bound {
            if k[0].abs() > b || k[1].abs() > b {
                continue;
            }
        }
        match newton_periodic(f, seed, k, q) {
            Ok(x) => {
                let (y, j) = iterate_jac(f, x, q)?;
                let shift = numeric::sub(y, x);
                let x0 = numeric::mod1(x);
                if points.iter().any(|p| numeric::torus_dist(p.x, x0) < 1e-9) {
                    continue;
                }
                let (ev, real) = numeric::eigenvalues(&j);
                let eigenvalues = if real { ev } else { [f64::NAN, f64::NAN] };
                points.push(PeriodicPoint { x: x0, k: [shift[0].round() as i64, shift[1].round() as i64], eigenvalues, period: q });
            }
            Err(_) => diverged.push(seed),
        }
    }
    if points.is_empty() {
        return Err(HypError::EmptyResult);
    }
    Ok(PeriodicSearch { points, diverged })
}

fn newton_periodic(f: &TorusLift, seed: Vec2, k: [i64; 2], q: usize) -> Result<Vec2, HypError> {
    let kf = [k[0] as f64, k[1] as f64];
    let mut x = seed;
    for _ in 0..60 {
        let (y, j) = iterate_jac(f, x, q)?;
        let g = numeric::sub(numeric::sub(y, x), kf);
        if numeric::norm(g) < 1e-13 {
            return Ok(x);
        }
        let jm = [[j[0][0] - 1.0, j[0][1]], [j[1][0], j[1][1] - 1.0]];
        let step = numeric::mat_vec(&numeric::mat_inv(&jm), g);
        x = numeric::sub(x, step);
        if !(x[0].is_finite() && x[1].is_finite()) {
            break;
        }
    }
    Err(HypError::NewtonDivergence { seed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cat_counts_match_lefschetz() {
        let f = TorusLift::cat();
        let a = f.linear_part();
        for q in 1..=4 {
            let aq = a.checked_pow(q as i64).unwrap();
            let expected = (aq.trace() - 2).unsigned_abs() as usize; // |det(A^q - I)| = |2 - tr A^q|
            let found = periodic_points(&f, q, None).unwrap();
            assert_eq!(found.points.len(), expected, "q = {q}");
            assert!(found.diverged.is_empty());
        }
    }

    #[test]
    fn cat_fixed_point_data() {
        let r = periodic_points(&TorusLift::cat(), 1, None).unwrap();
        assert_eq!(r.points.len(), 1);
        let p = &r.points[0];
        assert_eq!(p.x, [0.0, 0.0]);
        let lam = (3.0 + 5f64.sqrt()) / 2.0;
        assert!((p.eigenvalues[0] - lam).abs() < 1e-12 && (p.eigenvalues[1] - 1.0 / lam).abs() < 1e-12);
    }

    #[test]
    fn perturbed_fixed_point_continues() {
        let r = periodic_points(&TorusLift::cat_shear(0.05), 1, None).unwrap();
        assert_eq!(r.points.len(), 1);
        assert!(numeric::torus_dist(r.points[0].x, [0.0, 0.0]) < 1e-12);
        let r2 = periodic_points(&TorusLift::cat_shear(0.05), 2, None).unwrap();
        assert_eq!(r2.points.len(), 5);
    }
}
