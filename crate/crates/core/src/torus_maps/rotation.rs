use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{MapError, TorusLift};
use crate::exact_linalg::IntMatrix2;
use crate::numeric::{self, Kahan, Vec2};

/// `F^n(x) - x` in the plane.
///
/// Lifts with a hyperbolic linear part outgrow `f64` quickly; a
/// non-finite result is reported as an error, see [`displacement_exact`].
pub fn displacement(f: &TorusLift, x: Vec2, n: usize) -> Result<Vec2, MapError> {
    if n == 0 {
        return Err(MapError::Invalid("n must be at least 1".into()));
    }
    let d = numeric::sub(f.iterate(x, n)?, x);
    if !(d[0].is_finite() && d[1].is_finite()) {
        return Err(MapError::Overflow { n });
    }
    Ok(d)
}

/// `F^n(x) - x = real + integer`, with the integer part exact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactDisplacement {
    pub real: Vec2,
    /// Decimal strings, since the integer part can exceed any fixed width.
    pub integer: [String; 2],
}

impl ExactDisplacement {
    pub fn integer(&self) -> [BigInt; 2] {
        [self.integer[0].parse().expect("integer"), self.integer[1].parse().expect("integer")]
    }

    /// Nearest `f64`, infinite when out of range.
    pub fn to_f64(&self) -> Vec2 {
        let r = self.real;
        let k = self.integer();
        [r[0] + k[0].to_f64().unwrap_or(f64::INFINITY), r[1] + k[1].to_f64().unwrap_or(f64::INFINITY)]
    }
}

/// `F^n(x) - x` tracked as a point of `[0,1)^2` plus an exact integer
/// vector, using `F(y + k) = F(y) + M k`.
pub fn displacement_exact(f: &TorusLift, x: Vec2, n: usize) -> Result<ExactDisplacement, MapError> {
    let m = f.linear_part();
    let mut y = x;
    let mut k = [BigInt::zero(), BigInt::zero()];
    for _ in 0..n {
        let z = f.eval(y)?;
        let fl = [z[0].floor(), z[1].floor()];
        y = [z[0] - fl[0], z[1] - fl[1]];
        let b = |v: i64| BigInt::from(v);
        k = [
            b(m.0[0][0]) * &k[0] + b(m.0[0][1]) * &k[1] + b(fl[0] as i64),
            b(m.0[1][0]) * &k[0] + b(m.0[1][1]) * &k[1] + b(fl[1] as i64),
        ];
    }
    let real = numeric::sub(y, x);
    Ok(ExactDisplacement { real, integer: [k[0].to_string(), k[1].to_string()] })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RotationShape {
    Point { at: Vec2 },
    Segment { direction: Vec2, endpoints: [Vec2; 2] },
    Polygon,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotationSetEstimate {
    pub hull_vertices: Vec<Vec2>,
    pub shape: RotationShape,
    pub samples: usize,
    pub iterate_length: usize,
    /// `(n, hull diameter at n)` for `n = N/8, N/4, N/2, N`.
    pub diameter_trend: Vec<(usize, f64)>,
    pub point_tolerance: f64,
    /// Largest distance of a rotation vector from the line `α + t u`
    /// when a direction `u` was supplied.
    pub line_defect: Option<f64>,
}

impl RotationSetEstimate {
    /// Diameter never grows by more than `slack` as `n` doubles.
    pub fn trend_monotone(&self, slack: f64) -> bool {
        self.diameter_trend.windows(2).all(|w| w[1].1 <= w[0].1 + slack)
    }
}

/// Stratified jittered sample point `i` of an `s × s` grid on `[0,1)^2`.
pub fn stratified_point(seed: u64, i: usize, side: usize) -> Vec2 {
    let mut rng = numeric::indexed_rng(seed, i as u64);
    let (r, c) = (i / side, i % side);
    [(c as f64 + rng.gen::<f64>()) / side as f64, (r as f64 + rng.gen::<f64>()) / side as f64]
}

/// Misiurewicz-Ziemian rotation set from sampled orbit averages.
pub fn rotation_set(
    f: &TorusLift,
    n_iters: usize,
    n_samples: usize,
    seed: u64,
    direction: Option<Vec2>,
) -> Result<RotationSetEstimate, MapError> {
    if f.linear_part() != IntMatrix2::IDENTITY {
        return Err(MapError::NotHomotopicToIdentity(f.linear_part()));
    }
    if n_iters < 8 || n_samples == 0 {
        return Err(MapError::Invalid("need n_iters >= 8 and n_samples >= 1".into()));
    }
    let side = (n_samples as f64).sqrt().ceil() as usize;
    let checkpoints = [n_iters / 8, n_iters / 4, n_iters / 2, n_iters];
    let per_sample: Vec<[Vec2; 4]> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let x0 = stratified_point(seed, i, side);
            let mut x = x0;
            let mut out = [[0.0; 2]; 4];
            let mut k = 0;
            for n in 1..=n_iters {
                x = f.eval(x)?;
                if n == checkpoints[k] {
                    out[k] = numeric::scale(1.0 / n as f64, numeric::sub(x, x0));
                    k += 1;
                }
            }
            Ok(out)
        })
        .collect::<Result<_, MapError>>()?;

    let diameter_trend = (0..4)
        .map(|k| {
            let pts: Vec<Vec2> = per_sample.iter().map(|s| s[k]).collect();
            (checkpoints[k], numeric::diameter(&numeric::convex_hull(&pts)).0)
        })
        .collect();
    let vectors: Vec<Vec2> = per_sample.iter().map(|s| s[3]).collect();
    let hull = numeric::convex_hull(&vectors);
    let point_tolerance = 10.0 / n_iters as f64;
    let (diam, a, b) = numeric::diameter(&hull);
    let shape = if diam < point_tolerance {
        let mut sx = Kahan::new();
        let mut sy = Kahan::new();
        for v in &vectors {
            sx.add(v[0]);
            sy.add(v[1]);
        }
        let n = vectors.len() as f64;
        RotationShape::Point { at: [sx.value() / n, sy.value() / n] }
    } else if numeric::hull_width(&hull) < point_tolerance {
        let (lo, hi) = if (a[0], a[1]) <= (b[0], b[1]) { (a, b) } else { (b, a) };
        RotationShape::Segment { direction: numeric::normalize(numeric::sub(hi, lo)), endpoints: [lo, hi] }
    } else {
        RotationShape::Polygon
    };
    let line_defect = direction.map(|u| {
        let u = numeric::normalize(u);
        let base = vectors[0];
        vectors.iter().map(|&v| numeric::cross(u, numeric::sub(v, base)).abs()).fold(0.0, f64::max)
    });
    Ok(RotationSetEstimate {
        hull_vertices: hull,
        shape,
        samples: n_samples,
        iterate_length: n_iters,
        diameter_trend,
        point_tolerance,
        line_defect,
    })
}

/// `∫ F(x) - x dμ` for a discrete measure.
pub fn average_rotation_vector(f: &TorusLift, points: &[Vec2], weights: &[f64]) -> Result<Vec2, MapError> {
    if points.len() != weights.len() || weights.iter().any(|w| *w < 0.0 || !w.is_finite()) {
        return Err(MapError::Invalid("weights must be nonnegative and match the points".into()));
    }
    let total = numeric::kahan_sum(weights.iter().copied());
    if (total - 1.0).abs() > 1e-9 {
        return Err(MapError::Invalid(format!("weights sum to {total}, not 1")));
    }
    let mut acc = [Kahan::new(), Kahan::new()];
    for (x, w) in points.iter().zip(weights) {
        let d = numeric::sub(f.eval(*x)?, *x);
        acc[0].add(w * d[0]);
        acc[1].add(w * d[1]);
    }
    Ok([acc[0].value(), acc[1].value()])
}

/// Action on `H_1`: `F(x + e_i) - F(x)` rounded to integers.
pub fn homotopy_class(f: &TorusLift) -> Result<IntMatrix2, MapError> {
    let probes = [[0.0, 0.0], [0.123, 0.456], [0.77, 0.31]];
    let mut cols = [[0i64; 2]; 2];
    for (k, &x) in probes.iter().enumerate() {
        let fx = f.eval(x)?;
        for (i, col) in cols.iter_mut().enumerate() {
            let mut xe = x;
            xe[i] += 1.0;
            let d = numeric::sub(f.eval(xe)?, fx);
            for r in 0..2 {
                let rounded = d[r].round();
                if (d[r] - rounded).abs() > 1e-9 {
                    return Err(MapError::NonIntegerPeriodicity { at: x, value: d[r] });
                }
                if k > 0 && col[r] != rounded as i64 {
                    return Err(MapError::NonIntegerPeriodicity { at: x, value: d[r] });
                }
                col[r] = rounded as i64;
            }
        }
    }
    Ok(IntMatrix2::new(cols[0][0], cols[1][0], cols[0][1], cols[1][1]))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranslationDefect {
    pub max_pair_defect: f64,
    pub is_translation: bool,
}

/// `max |(F(x) - x) - (F(y) - y)|` over pairs of a uniform grid.
///
/// The grid side is rounded up to a multiple of 4 so quarter-period
/// extrema of single-mode perturbations are hit exactly.
pub fn translation_defect(f: &TorusLift, n_samples: usize) -> Result<TranslationDefect, MapError> {
    if f.linear_part() != IntMatrix2::IDENTITY {
        return Err(MapError::NotHomotopicToIdentity(f.linear_part()));
    }
    let side = (((n_samples.max(16)) as f64).sqrt().ceil() as usize).div_ceil(4) * 4;
    let disp: Vec<Vec2> = (0..side * side)
        .into_par_iter()
        .map(|i| {
            let x = [(i % side) as f64 / side as f64, (i / side) as f64 / side as f64];
            f.eval(x).map(|y| numeric::sub(y, x))
        })
        .collect::<Result<_, _>>()?;
    let d = numeric::diameter(&numeric::convex_hull(&disp)).0;
    Ok(TranslationDefect { max_pair_defect: d, is_translation: d < 1e-9 })
}
