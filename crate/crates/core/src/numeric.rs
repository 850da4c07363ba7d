//! Small float helpers shared by the dynamics modules.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Vec2 = [f64; 2];
pub type Mat2 = [[f64; 2]; 2];

pub const TAU: f64 = std::f64::consts::TAU;

pub const IDENTITY2: Mat2 = [[1.0, 0.0], [0.0, 1.0]];

#[inline]
pub fn add(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] + b[0], a[1] + b[1]]
}

#[inline]
pub fn sub(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub fn scale(s: f64, a: Vec2) -> Vec2 {
    [s * a[0], s * a[1]]
}

#[inline]
pub fn dot(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
pub fn cross(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
pub fn norm(a: Vec2) -> f64 {
    a[0].hypot(a[1])
}

#[inline]
pub fn normalize(a: Vec2) -> Vec2 {
    let n = norm(a);
    [a[0] / n, a[1] / n]
}

#[inline]
pub fn mat_vec(m: &Mat2, v: Vec2) -> Vec2 {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

#[inline]
pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

#[inline]
pub fn det(m: &Mat2) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

pub fn mat_inv(m: &Mat2) -> Mat2 {
    let d = det(m);
    [[m[1][1] / d, -m[0][1] / d], [-m[1][0] / d, m[0][0] / d]]
}

pub fn transpose(m: &Mat2) -> Mat2 {
    [[m[0][0], m[1][0]], [m[0][1], m[1][1]]]
}

/// Spectral norm of a 2×2 matrix.
pub fn op_norm(m: &Mat2) -> f64 {
    let a = m[0][0] * m[0][0] + m[1][0] * m[1][0];
    let b = m[0][0] * m[0][1] + m[1][0] * m[1][1];
    let c = m[0][1] * m[0][1] + m[1][1] * m[1][1];
    let tr = a + c;
    let disc = ((a - c) * (a - c) + 4.0 * b * b).sqrt();
    ((tr + disc) / 2.0).sqrt()
}

/// Real eigenvalues of a 2×2 matrix, or the complex pair as `(re, im)`.
pub fn eigenvalues(m: &Mat2) -> ([f64; 2], bool) {
    let tr = m[0][0] + m[1][1];
    let d = det(m);
    let disc = tr * tr - 4.0 * d;
    if disc >= 0.0 {
        let s = disc.sqrt();
        // Stable root pairing.
        let big = if tr >= 0.0 { (tr + s) / 2.0 } else { (tr - s) / 2.0 };
        let small = if big != 0.0 { d / big } else { 0.0 };
        ([big, small], true)
    } else {
        ([tr / 2.0, (-disc).sqrt() / 2.0], false)
    }
}

/// Eigenvector of a 2×2 matrix for a real eigenvalue.
pub fn eigenvector(m: &Mat2, mu: f64) -> Vec2 {
    let r0 = [m[0][0] - mu, m[0][1]];
    let r1 = [m[1][0], m[1][1] - mu];
    let r = if norm(r0) >= norm(r1) { r0 } else { r1 };
    normalize([-r[1], r[0]])
}

/// Angle in `[0, pi/2]` between the lines spanned by `a` and `b`.
pub fn line_angle(a: Vec2, b: Vec2) -> f64 {
    cross(a, b).abs().atan2(dot(a, b).abs())
}

/// Reduces into `[0, 1)^2`.
#[inline]
pub fn mod1(x: Vec2) -> Vec2 {
    [x[0].rem_euclid(1.0), x[1].rem_euclid(1.0)]
}

/// Representative of `x mod Z^2` in `[-1/2, 1/2)^2`.
#[inline]
pub fn wrap_centered(x: Vec2) -> Vec2 {
    [x[0] - x[0].round(), x[1] - x[1].round()]
}

/// Distance on the torus.
pub fn torus_dist(a: Vec2, b: Vec2) -> f64 {
    norm(wrap_centered(sub(a, b)))
}

/// Compensated accumulator (Kahan-Babuska-Neumaier variant).
#[derive(Clone, Copy, Debug, Default)]
pub struct Kahan {
    sum: f64,
    c: f64,
}

impl Kahan {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.c
    }
}

pub fn kahan_sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    let mut k = Kahan::new();
    for x in xs {
        k.add(x);
    }
    k.value()
}

/// Mean and population standard deviation with compensated sums.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let m = kahan_sum(xs.iter().copied()) / n;
    let v = kahan_sum(xs.iter().map(|x| (x - m) * (x - m))) / n;
    (m, v.sqrt())
}

/// Deterministic per-index generator: one ChaCha stream per work item, so
/// results do not depend on how items are scheduled across threads.
pub fn indexed_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Seed from `ABC_SEED` if set, else the given default.
pub fn seed_from_env(default: u64) -> u64 {
    std::env::var("ABC_SEED").ok().and_then(|s| s.trim().parse().ok()).unwrap_or(default)
}

/// Convex hull (Andrew's monotone chain), counter-clockwise, no collinear points.
pub fn convex_hull(points: &[Vec2]) -> Vec<Vec2> {
    let mut pts: Vec<Vec2> = points.iter().copied().filter(|p| p[0].is_finite() && p[1].is_finite()).collect();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let turn = |o: Vec2, a: Vec2, b: Vec2| cross(sub(a, o), sub(b, o));
    let mut lower: Vec<Vec2> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && turn(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Vec2> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && turn(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Largest distance between two points of a (hull) point set.
pub fn diameter(points: &[Vec2]) -> (f64, Vec2, Vec2) {
    let mut best = (0.0, [0.0; 2], [0.0; 2]);
    for (i, &a) in points.iter().enumerate() {
        for &b in &points[i + 1..] {
            let d = norm(sub(a, b));
            if d > best.0 {
                best = (d, a, b);
            }
        }
    }
    if points.len() == 1 {
        best.1 = points[0];
        best.2 = points[0];
    }
    best
}

/// Minimum width of a convex polygon (rotating-edge bound).
pub fn hull_width(hull: &[Vec2]) -> f64 {
    if hull.len() < 3 {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    for i in 0..hull.len() {
        let a = hull[i];
        let b = hull[(i + 1) % hull.len()];
        let e = sub(b, a);
        let len = norm(e);
        if len == 0.0 {
            continue;
        }
        let far = hull.iter().map(|&p| cross(e, sub(p, a)).abs() / len).fold(0.0, f64::max);
        best = best.min(far);
    }
    best
}

/// Ordinary least-squares slope and intercept.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = kahan_sum(xs.iter().copied()) / n;
    let my = kahan_sum(ys.iter().copied()) / n;
    let sxy = kahan_sum(xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)));
    let sxx = kahan_sum(xs.iter().map(|x| (x - mx) * (x - mx)));
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hull_of_square_with_interior_points() {
        let pts = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.5], [0.5, 0.0]];
        let h = convex_hull(&pts);
        assert_eq!(h.len(), 4);
        assert!((hull_width(&h) - 1.0).abs() < 1e-15);
        assert!((diameter(&h).0 - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn kahan_beats_naive_on_cancellation() {
        let xs = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(kahan_sum(xs), 2.0);
    }

    #[test]
    fn indexed_streams_are_independent_of_order() {
        use rand::Rng;
        let a: f64 = indexed_rng(7, 3).gen();
        let _: f64 = indexed_rng(7, 2).gen();
        let b: f64 = indexed_rng(7, 3).gen();
        assert_eq!(a, b);
        let c: f64 = indexed_rng(7, 4).gen();
        assert_ne!(a, c);
    }

    #[test]
    fn op_norm_of_shear() {
        let m = [[1.0, 1.0], [0.0, 1.0]];
        assert!((op_norm(&m) - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-14);
    }

    #[test]
    fn line_angles() {
        assert!(line_angle([1.0, 0.0], [-1.0, 0.0]) < 1e-16);
        assert!((line_angle([1.0, 0.0], [0.0, 2.0]) - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }
}
