//! Embedded 1-disks near hyperbolic fixed points.
//!
//! A disk is a polyline of jets (point plus unit tangent) ordered along the
//! curve. Pushing a disk through a map works on a short window around a
//! chosen crossing point: the window is Hermite-resampled, mapped with
//! Jacobians and clipped to the adapted box of the target chart.

use serde::{Deserialize, Serialize};

use super::HypError;
use crate::numeric::{self, Mat2, Vec2};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jet {
    pub p: Vec2,
    pub t: Vec2,
}

pub type Disk = Vec<Jet>;

/// A map with its Jacobian, shareable across worker threads.
pub type MapFn<'a> = dyn Fn(Vec2) -> Result<(Vec2, Mat2), HypError> + Sync + 'a;

/// Samples per resampled window.
pub const WINDOW_SAMPLES: usize = 400;

/// Affine chart `x = c + u e_u + s e_s`, read modulo `Z^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Chart {
    pub center: Vec2,
    pub e_u: Vec2,
    pub e_s: Vec2,
}

impl Chart {
    pub fn new(center: Vec2, e_u: Vec2, e_s: Vec2) -> Self {
        Chart { center, e_u: numeric::normalize(e_u), e_s: numeric::normalize(e_s) }
    }

    fn basis(&self) -> Mat2 {
        [[self.e_u[0], self.e_s[0]], [self.e_u[1], self.e_s[1]]]
    }

    /// The lift of `x` closest to the chart center.
    pub fn lift(&self, x: Vec2) -> Vec2 {
        numeric::add(self.center, numeric::wrap_centered(numeric::sub(x, self.center)))
    }

    /// Chart coordinates `(u, s)`.
    pub fn coords(&self, x: Vec2) -> Vec2 {
        numeric::mat_vec(&numeric::mat_inv(&self.basis()), numeric::wrap_centered(numeric::sub(x, self.center)))
    }

    pub fn vector_coords(&self, v: Vec2) -> Vec2 {
        numeric::mat_vec(&numeric::mat_inv(&self.basis()), v)
    }

    pub fn point(&self, c: Vec2) -> Vec2 {
        numeric::add(self.center, numeric::mat_vec(&self.basis(), c))
    }

    pub fn in_box(&self, x: Vec2, delta: f64) -> bool {
        let c = self.coords(x);
        c[0].abs() < delta && c[1].abs() < delta
    }

    /// Straight disk `{c0 + τ dir : |τ| ≤ half}` in chart coordinates.
    pub fn segment(&self, c0: Vec2, dir: Vec2, half: f64, n: usize) -> Disk {
        let tangent = numeric::normalize(numeric::mat_vec(&self.basis(), dir));
        (0..n)
            .map(|k| {
                let tau = -half + 2.0 * half * k as f64 / (n - 1) as f64;
                Jet { p: self.point(numeric::add(c0, numeric::scale(tau, dir))), t: tangent }
            })
            .collect()
    }
}

/// Which chart coordinate a manifold is a graph over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    /// `s = φ(u)`: unstable manifolds.
    U,
    /// `u = ψ(s)`: stable manifolds.
    S,
}

impl Axis {
    fn split(self, c: Vec2) -> (f64, f64) {
        match self {
            Axis::U => (c[0], c[1]),
            Axis::S => (c[1], c[0]),
        }
    }
}

/// A local manifold as a graph in chart coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Graph {
    pub chart: Chart,
    pub axis: Axis,
    /// `(t, value, slope)` sorted by `t`.
    pub nodes: Vec<(f64, f64, f64)>,
}

impl Graph {
    pub fn from_disk(disk: &Disk, chart: Chart, axis: Axis) -> Result<Self, HypError> {
        let mut nodes = Vec::with_capacity(disk.len());
        for j in disk {
            let (t, v) = axis.split(chart.coords(j.p));
            let (dt, dv) = axis.split(chart.vector_coords(j.t));
            if dt.abs() < 1e-12 {
                return Err(HypError::ManifoldTrackingLoss("manifold is not a graph over its axis".into()));
            }
            nodes.push((t, v, dv / dt));
        }
        nodes.sort_by(|a, b| a.0.total_cmp(&b.0));
        nodes.dedup_by(|a, b| a.0 == b.0);
        if nodes.len() < 2 {
            return Err(HypError::ManifoldTrackingLoss("degenerate manifold".into()));
        }
        Ok(Graph { chart, axis, nodes })
    }

    pub fn range(&self) -> (f64, f64) {
        (self.nodes[0].0, self.nodes[self.nodes.len() - 1].0)
    }

    /// Cubic Hermite value and slope at `t`.
    pub fn eval(&self, t: f64) -> Option<(f64, f64)> {
        let (lo, hi) = self.range();
        if !(lo..=hi).contains(&t) {
            return None;
        }
        let i = self.nodes.partition_point(|n| n.0 <= t).clamp(1, self.nodes.len() - 1) - 1;
        let (t0, v0, m0) = self.nodes[i];
        let (t1, v1, m1) = self.nodes[i + 1];
        let h = t1 - t0;
        let x = (t - t0) / h;
        let (x2, x3) = (x * x, x * x * x);
        let v = (2.0 * x3 - 3.0 * x2 + 1.0) * v0 + (x3 - 2.0 * x2 + x) * h * m0 + (-2.0 * x3 + 3.0 * x2) * v1 + (x3 - x2) * h * m1;
        let dv = ((6.0 * x2 - 6.0 * x) * v0 + (3.0 * x2 - 4.0 * x + 1.0) * h * m0 + (-6.0 * x2 + 6.0 * x) * v1 + (3.0 * x2 - 2.0 * x) * h * m1) / h;
        Some((v, dv))
    }

    /// Unit tangent in the plane at parameter `t`.
    pub fn tangent(&self, slope: f64) -> Vec2 {
        let c = match self.axis {
            Axis::U => [1.0, slope],
            Axis::S => [slope, 1.0],
        };
        numeric::normalize(numeric::mat_vec(&self.chart.basis(), c))
    }
}

/// Cumulative chord length of a disk lifted near `chart`.
fn arclength(disk: &Disk, chart: &Chart) -> Vec<f64> {
    let mut s = Vec::with_capacity(disk.len());
    let mut acc = 0.0;
    let mut prev = chart.lift(disk[0].p);
    for j in disk {
        let p = numeric::add(prev, numeric::wrap_centered(numeric::sub(j.p, prev)));
        acc += numeric::norm(numeric::sub(p, prev));
        s.push(acc);
        prev = p;
    }
    s
}

/// Crossing of a disk with a graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub sigma: f64,
    pub point: Vec2,
    pub angle: f64,
}

/// Transverse crossing of `disk` with `graph` closest to the chart center.
pub fn crossing(disk: &Disk, graph: &Graph) -> Option<Crossing> {
    let chart = &graph.chart;
    let sig = arclength(disk, chart);
    let resid: Vec<Option<f64>> = disk
        .iter()
        .map(|j| {
            let (t, v) = graph.axis.split(chart.coords(j.p));
            graph.eval(t).map(|(g, _)| v - g)
        })
        .collect();
    let mut best: Option<(f64, Crossing)> = None;
    for i in 0..disk.len().saturating_sub(1) {
        let (Some(r0), Some(r1)) = (resid[i], resid[i + 1]) else { continue };
        if r0 == 0.0 || r0.signum() != r1.signum() {
            let w = if r0 == r1 { 0.0 } else { r0 / (r0 - r1) };
            let sigma = sig[i] + w * (sig[i + 1] - sig[i]);
            let jet = hermite_at(disk, &sig, chart, sigma);
            let (t, _) = graph.axis.split(chart.coords(jet.p));
            let angle = graph.eval(t).map(|(_, sl)| numeric::line_angle(jet.t, graph.tangent(sl))).unwrap_or(0.0);
            let dist = numeric::norm(chart.coords(jet.p));
            if best.as_ref().is_none_or(|b| dist < b.0) {
                best = Some((dist, Crossing { sigma, point: jet.p, angle }));
            }
        }
    }
    best.map(|b| b.1)
}

/// Cubic Hermite jet at arclength `sigma`.
fn hermite_at(disk: &Disk, sig: &[f64], chart: &Chart, sigma: f64) -> Jet {
    let n = disk.len();
    let i = sig.partition_point(|s| *s <= sigma).clamp(1, n - 1) - 1;
    let p0 = chart.lift(disk[i].p);
    let p1 = numeric::add(p0, numeric::wrap_centered(numeric::sub(disk[i + 1].p, p0)));
    let h = sig[i + 1] - sig[i];
    if h <= 0.0 {
        return Jet { p: p0, t: disk[i].t };
    }
    let x = ((sigma - sig[i]) / h).clamp(0.0, 1.0);
    let (x2, x3) = (x * x, x * x * x);
    let m0 = numeric::scale(h, disk[i].t);
    let m1 = numeric::scale(h, disk[i + 1].t);
    let mut p = [0.0; 2];
    let mut d = [0.0; 2];
    for k in 0..2 {
        p[k] = (2.0 * x3 - 3.0 * x2 + 1.0) * p0[k] + (x3 - 2.0 * x2 + x) * m0[k] + (-2.0 * x3 + 3.0 * x2) * p1[k] + (x3 - x2) * m1[k];
        d[k] = (6.0 * x2 - 6.0 * x) * p0[k] + (3.0 * x2 - 4.0 * x + 1.0) * m0[k] + (-6.0 * x2 + 6.0 * x) * p1[k] + (3.0 * x2 - 2.0 * x) * m1[k];
    }
    Jet { p, t: numeric::normalize(d) }
}

/// Result of pushing a disk window through a map.
#[derive(Debug, Clone)]
pub struct Pushed {
    pub disk: Disk,
    /// Arclength position of the crossing's image in `disk`.
    pub sigma: f64,
}

/// Maps the part of `disk` near arclength `sigma` and clips the image to
/// the `delta`-box of `target`, keeping the component through the image of
/// the crossing. The window grows until the image leaves the box on both
/// sides.
pub fn push_window(
    disk: &Disk,
    source: &Chart,
    sigma: f64,
    map: &MapFn<'_>,
    target: &Chart,
    delta: f64,
) -> Result<Pushed, HypError> {
    let sig = arclength(disk, source);
    let total = *sig.last().unwrap_or(&0.0);
    let c = hermite_at(disk, &sig, source, sigma);
    let (_, jc) = map(c.p)?;
    let stretch = numeric::norm(numeric::mat_vec(&jc, c.t));
    let mut w = 1.5 * delta / stretch.max(1e-300);
    for _ in 0..12 {
        if w < 1e-14 * (1.0 + sigma.abs()) {
            return Err(HypError::ManifoldTrackingLoss(format!("window {w:e} below double precision")));
        }
        let lo = (sigma - w).max(0.0);
        let hi = (sigma + w).min(total);
        let half = WINDOW_SAMPLES / 2;
        let mut params = Vec::with_capacity(WINDOW_SAMPLES + 1);
        for k in 0..half {
            params.push(lo + (sigma - lo) * k as f64 / half as f64);
        }
        let ic = params.len();
        for k in 0..=half {
            params.push(sigma + (hi - sigma) * k as f64 / half as f64);
        }
        let mut image = Vec::with_capacity(params.len());
        for &s in &params {
            let j = hermite_at(disk, &sig, source, s);
            let (y, d) = map(j.p)?;
            image.push(Jet { p: target.lift(y), t: numeric::normalize(numeric::mat_vec(&d, j.t)) });
        }
        if !target.in_box(image[ic].p, delta) {
            return Err(HypError::ManifoldTrackingLoss("image of the crossing left the adapted box".into()));
        }
        let mut l = ic;
        while l > 0 && target.in_box(image[l - 1].p, delta) {
            l -= 1;
        }
        let mut r = ic;
        while r + 1 < image.len() && target.in_box(image[r + 1].p, delta) {
            r += 1;
        }
        let left_open = l == 0;
        let right_open = r + 1 == image.len();
        if (left_open && lo > 0.0) || (right_open && hi < total) {
            w *= 2.0;
            continue;
        }
        if left_open || right_open {
            return Err(HypError::ManifoldTrackingLoss("tracked disk ends inside the adapted box".into()));
        }
        let out: Disk = image[l..=r].to_vec();
        let s_out = arclength(&out, target);
        return Ok(Pushed { sigma: s_out[ic - l], disk: out });
    }
    Err(HypError::ManifoldTrackingLoss("window search did not cover the box".into()))
}

/// `max (position gap + tangent angle)` of `disk` against `graph` over the
/// common parameter range.
pub fn c1_distance(disk: &Disk, graph: &Graph) -> f64 {
    let mut worst: f64 = 0.0;
    let mut any = false;
    for j in disk {
        let (t, v) = graph.axis.split(graph.chart.coords(j.p));
        if let Some((g, sl)) = graph.eval(t) {
            any = true;
            worst = worst.max((v - g).abs() + numeric::line_angle(j.t, graph.tangent(sl)));
        }
    }
    if any {
        worst
    } else {
        f64::INFINITY
    }
}

/// Local manifold of a fixed point `chart.center` of `map`, grown from the
/// linear segment along `axis` by repeated windowed pushes.
pub fn grow_manifold(map: &MapFn<'_>, chart: Chart, axis: Axis, delta: f64, reps: usize) -> Result<(Disk, Graph), HypError> {
    let dir = match axis {
        Axis::U => [1.0, 0.0],
        Axis::S => [0.0, 1.0],
    };
    let mut disk = chart.segment([0.0, 0.0], dir, 1.2 * delta, WINDOW_SAMPLES + 1);
    let mut sigma = arclength(&disk, &chart)[WINDOW_SAMPLES / 2];
    for _ in 0..reps {
        let pushed = push_window(&disk, &chart, sigma, map, &chart, delta)?;
        disk = pushed.disk;
        sigma = pushed.sigma;
    }
    let graph = Graph::from_disk(&disk, chart, axis)?;
    Ok((disk, graph))
}

/// Distance from `x` to the segment polyline of `disk`, modulo `Z^2`.
pub fn distance_to_disk(x: Vec2, disk: &Disk) -> f64 {
    let mut best = f64::INFINITY;
    let base = disk[0].p;
    let xl = numeric::add(base, numeric::wrap_centered(numeric::sub(x, base)));
    for w in disk.windows(2) {
        let a = w[0].p;
        let b = numeric::add(a, numeric::wrap_centered(numeric::sub(w[1].p, a)));
        let xa = numeric::add(a, numeric::wrap_centered(numeric::sub(xl, a)));
        let ab = numeric::sub(b, a);
        let len2 = numeric::dot(ab, ab);
        let tau = if len2 > 0.0 { (numeric::dot(numeric::sub(xa, a), ab) / len2).clamp(0.0, 1.0) } else { 0.0 };
        best = best.min(numeric::norm(numeric::sub(xa, numeric::add(a, numeric::scale(tau, ab)))));
    }
    best
}

/// Directed distance `max_{x ∈ disk} dist(x, set)`.
pub fn directed_distance(disk: &Disk, set: &[Disk]) -> f64 {
    disk.iter()
        .map(|j| set.iter().map(|d| distance_to_disk(j.p, d)).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cat_map(x: Vec2) -> Result<(Vec2, Mat2), HypError> {
        let m = [[2.0, 1.0], [1.0, 1.0]];
        Ok((numeric::mat_vec(&m, x), m))
    }

    fn cat_chart() -> Chart {
        let m = [[2.0, 1.0], [1.0, 1.0]];
        let (ev, _) = numeric::eigenvalues(&m);
        Chart::new([0.0, 0.0], numeric::eigenvector(&m, ev[0]), numeric::eigenvector(&m, ev[1]))
    }

    #[test]
    fn linear_manifold_is_the_axis() {
        let (_, g) = grow_manifold(&cat_map, cat_chart(), Axis::U, 0.05, 2).unwrap();
        for n in &g.nodes {
            assert!(n.1.abs() < 1e-14 && n.2.abs() < 1e-12);
        }
        let (lo, hi) = g.range();
        assert!(lo < -0.049 && hi > 0.049);
    }

    #[test]
    fn crossing_and_push_converge_to_unstable_axis() {
        let chart = cat_chart();
        let (_, ws) = grow_manifold(
            &|x| {
                let mi = [[1.0, -1.0], [-1.0, 2.0]];
                Ok((numeric::mat_vec(&mi, x), mi))
            },
            chart,
            Axis::S,
            0.05,
            2,
        )
        .unwrap();
        let (_, wu) = grow_manifold(&cat_map, chart, Axis::U, 0.05, 2).unwrap();
        // A segment of the diagonal through the fixed point.
        let disk = chart.segment(chart.coords([0.0, 0.0]), chart.vector_coords([1.0, 1.0]), 0.02, 101);
        let c = crossing(&disk, &ws).unwrap();
        assert!(c.angle > 0.1);
        let mut d = disk;
        let mut sigma = c.sigma;
        for _ in 0..6 {
            let p = push_window(&d, &chart, sigma, &cat_map, &chart, 0.05).unwrap();
            d = p.disk;
            sigma = p.sigma;
        }
        assert!(c1_distance(&d, &wu) < 1e-4);
    }

    #[test]
    fn directed_distance_of_subset_is_zero() {
        let chart = cat_chart();
        let a = chart.segment([0.0, 0.0], [1.0, 0.0], 0.05, 11);
        let b = chart.segment([0.0, 0.0], [1.0, 0.0], 0.02, 11);
        assert!(directed_distance(&b, std::slice::from_ref(&a)) < 1e-15);
        assert!(directed_distance(&a, &[b]) > 0.02);
    }
}
