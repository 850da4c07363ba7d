use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::ConjError;
use crate::numeric::{self, Vec2};

/// Vector field on the `N × N` periodic grid with bilinear interpolation.
/// Node `(i/N, j/N)` is stored at index `j*N + i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    pub resolution: usize,
    pub values: Vec<Vec2>,
}

impl GridFunction {
    pub fn zeros(resolution: usize) -> Self {
        GridFunction { resolution, values: vec![[0.0, 0.0]; resolution * resolution] }
    }

    pub fn from_fn(resolution: usize, f: impl Fn(Vec2) -> Vec2) -> Self {
        let n = resolution;
        let values = (0..n * n).map(|k| f([(k % n) as f64 / n as f64, (k / n) as f64 / n as f64])).collect();
        GridFunction { resolution, values }
    }

    pub fn node(&self, i: usize, j: usize) -> Vec2 {
        [i as f64 / self.resolution as f64, j as f64 / self.resolution as f64]
    }

    pub fn at(&self, i: usize, j: usize) -> Vec2 {
        let n = self.resolution;
        self.values[(j % n) * n + (i % n)]
    }

    /// Bilinear interpolation; arguments are read mod 1.
    pub fn eval(&self, x: Vec2) -> Vec2 {
        bilinear(self.resolution, x, |k| self.values[k])
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| numeric::norm(*v)).fold(0.0, f64::max)
    }

    /// `max |w(x + k e_i) - w(x)|` over nodes and both axes.
    pub fn oscillation(&self, k: usize) -> f64 {
        let n = self.resolution;
        let mut m: f64 = 0.0;
        for j in 0..n {
            for i in 0..n {
                let v = self.at(i, j);
                m = m.max(numeric::norm(numeric::sub(self.at(i + k, j), v)));
                m = m.max(numeric::norm(numeric::sub(self.at(i, j + k), v)));
            }
        }
        m
    }

    /// Smallest Jacobian determinant of `id + w` from cell differences.
    pub fn min_jacobian_det(&self) -> f64 {
        let n = self.resolution;
        let nf = n as f64;
        let mut m = f64::INFINITY;
        for j in 0..n {
            for i in 0..n {
                let v = self.at(i, j);
                let dx = numeric::scale(nf, numeric::sub(self.at(i + 1, j), v));
                let dy = numeric::scale(nf, numeric::sub(self.at(i, j + 1), v));
                m = m.min((1.0 + dx[0]) * (1.0 + dy[1]) - dx[1] * dy[0]);
            }
        }
        m
    }

    /// Text `.grid` dump: a header then `i,j,wx,wy` rows.
    pub fn to_grid_string(&self) -> String {
        let n = self.resolution;
        let mut s = String::with_capacity(n * n * 48 + 64);
        s.push_str("# abc grid v1: h = id + w on the N x N torus grid\n");
        let _ = writeln!(s, "resolution {n}");
        s.push_str("i,j,wx,wy\n");
        for j in 0..n {
            for i in 0..n {
                let v = self.at(i, j);
                let _ = writeln!(s, "{i},{j},{:e},{:e}", v[0], v[1]);
            }
        }
        s
    }

    pub fn from_grid_str(text: &str) -> Result<Self, ConjError> {
        let bad = |m: String| ConjError::Parse(m);
        let mut lines = text.lines().filter(|l| !l.trim_start().starts_with('#') && !l.trim().is_empty());
        let head = lines.next().ok_or_else(|| bad("empty grid file".into()))?;
        let n: usize = head
            .strip_prefix("resolution")
            .and_then(|r| r.trim().parse().ok())
            .filter(|n| *n > 0)
            .ok_or_else(|| bad(format!("expected 'resolution N', got {head:?}")))?;
        if lines.next().map(str::trim) != Some("i,j,wx,wy") {
            return Err(bad("missing column header 'i,j,wx,wy'".into()));
        }
        let mut values = vec![[f64::NAN; 2]; n * n];
        let mut seen = 0usize;
        for (row, line) in lines.enumerate() {
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            if f.len() != 4 {
                return Err(bad(format!("row {row}: expected 4 fields")));
            }
            let i: usize = f[0].parse().map_err(|_| bad(format!("row {row}: bad i")))?;
            let j: usize = f[1].parse().map_err(|_| bad(format!("row {row}: bad j")))?;
            let wx: f64 = f[2].parse().map_err(|_| bad(format!("row {row}: bad wx")))?;
            let wy: f64 = f[3].parse().map_err(|_| bad(format!("row {row}: bad wy")))?;
            if i >= n || j >= n {
                return Err(bad(format!("row {row}: node ({i},{j}) outside the grid")));
            }
            values[j * n + i] = [wx, wy];
            seen += 1;
        }
        if seen != n * n || values.iter().any(|v| v[0].is_nan()) {
            return Err(bad(format!("expected {} nodes, found {seen}", n * n)));
        }
        Ok(GridFunction { resolution: n, values })
    }
}

/// Periodic bilinear interpolation of node data given by `get(index)`.
pub(crate) fn bilinear<T>(n: usize, x: Vec2, get: impl Fn(usize) -> T) -> T
where
    T: Lerp,
{
    let nf = n as f64;
    let gx = x[0].rem_euclid(1.0) * nf;
    let gy = x[1].rem_euclid(1.0) * nf;
    let i0 = (gx.floor() as usize).min(n - 1);
    let j0 = (gy.floor() as usize).min(n - 1);
    let (tx, ty) = (gx - i0 as f64, gy - j0 as f64);
    let i1 = (i0 + 1) % n;
    let j1 = (j0 + 1) % n;
    let bottom = T::lerp(get(j0 * n + i0), get(j0 * n + i1), tx);
    let top = T::lerp(get(j1 * n + i0), get(j1 * n + i1), tx);
    T::lerp(bottom, top, ty)
}

pub(crate) trait Lerp {
    fn lerp(a: Self, b: Self, t: f64) -> Self;
}

impl Lerp for f64 {
    fn lerp(a: f64, b: f64, t: f64) -> f64 {
        a + t * (b - a)
    }
}

impl Lerp for Vec2 {
    fn lerp(a: Vec2, b: Vec2, t: f64) -> Vec2 {
        [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
    }
}
