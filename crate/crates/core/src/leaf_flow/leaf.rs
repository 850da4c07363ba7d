use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::circle::CircleLift;
use super::kam::{circle_conjugacy, CircleConjugacy};
use super::FlowError;
use crate::exact_linalg::{eigen_data, IntMatrix2};
use crate::numeric;

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Increasing diffeomorphism of a leaf, in a real coordinate along it.
#[derive(Clone)]
pub struct LeafMap {
    pub label: String,
    f: RealFn,
    inv: RealFn,
    df: RealFn,
}

impl fmt::Debug for LeafMap {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(fm, "LeafMap({})", self.label)
    }
}

impl LeafMap {
    pub fn new(
        label: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        inv: impl Fn(f64) -> f64 + Send + Sync + 'static,
        df: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        LeafMap { label: label.into(), f: Arc::new(f), inv: Arc::new(inv), df: Arc::new(df) }
    }

    pub fn translation(t: f64) -> Self {
        LeafMap::new(format!("s + {t}"), move |s| s + t, move |s| s - t, |_| 1.0)
    }

    pub fn affine(a: f64, b: f64) -> Self {
        LeafMap::new(format!("{a}·s + {b}"), move |s| a * s + b, move |s| (s - b) / a, move |_| a)
    }

    /// A degree-one circle lift used as a leaf map.
    pub fn from_circle(g: CircleLift) -> Self {
        let (g1, g2, g3) = (g.clone(), g.clone(), g);
        LeafMap::new("circle lift", move |s| g1.eval(s), move |s| g2.inverse(s), move |s| g3.deriv(s))
    }

    pub fn eval(&self, s: f64) -> f64 {
        (self.f)(s)
    }

    pub fn inverse(&self, s: f64) -> f64 {
        (self.inv)(s)
    }

    pub fn deriv(&self, s: f64) -> f64 {
        (self.df)(s)
    }

    /// `phi ∘ self ∘ phi⁻¹`.
    pub fn conjugate(&self, phi: &LeafMap) -> LeafMap {
        let (a, b, c) = (self.clone(), phi.clone(), phi.clone());
        let (ai, bi, ci) = (self.clone(), phi.clone(), phi.clone());
        let (ad, bd, cd) = (self.clone(), phi.clone(), phi.clone());
        LeafMap::new(
            format!("{} ∘ {} ∘ {}⁻¹", phi.label, self.label, phi.label),
            move |s| b.eval(a.eval(c.inverse(s))),
            move |s| bi.eval(ai.inverse(ci.inverse(s))),
            move |s| {
                let x = cd.inverse(s);
                let y = ad.eval(x);
                bd.deriv(y) * ad.deriv(x) / cd.deriv(x)
            },
        )
    }
}

/// Points and bisection for a sign change of `f(s) − s` on `[lo, hi]`.
fn locate_fixed_point(f: &LeafMap, lo: f64, hi: f64) -> Option<f64> {
    const SAMPLES: usize = 1000;
    let d = |s: f64| f.eval(s) - s;
    let mut prev = (lo, d(lo));
    if prev.1 == 0.0 {
        return Some(lo);
    }
    for i in 1..=SAMPLES {
        let s = lo + (hi - lo) * i as f64 / SAMPLES as f64;
        let v = d(s);
        if v == 0.0 {
            return Some(s);
        }
        if v.signum() != prev.1.signum() {
            let (mut a, mut b) = (prev.0, s);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if d(m).signum() == d(a).signum() {
                    a = m;
                } else {
                    b = m;
                }
            }
            return Some(0.5 * (a + b));
        }
        prev = (s, v);
    }
    None
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeafTranslation {
    /// Translation number of `f₂` counted in `f₁`-fundamental domains.
    pub c: f64,
    pub error_bound: f64,
    /// Slope of the expanding eigenvector of `Bᵀ`.
    pub unstable_slope: f64,
    /// `|c − unstable_slope| < 1e-6`.
    pub check: bool,
    /// `|(B⁻ⁿ)ᵀ (1, c)|` for `n = 1..=30`, exact integer powers. In f64 the
    /// rounding of `c` is amplified by `λⁿ`, so only the early decay is meaningful.
    pub contraction_norms: Vec<f64>,
}

/// Translation number of `f₂` on the circle `[x0, f₁(x0)]/∼` and the test
/// that `(1, c)` spans the expanding direction of `Bᵀ`.
pub fn leaf_translation_structure(
    f1: &LeafMap,
    f2: &LeafMap,
    interval: (f64, f64),
    b: &IntMatrix2,
    n: usize,
) -> Result<LeafTranslation, FlowError> {
    let (lo, hi) = interval;
    if !(lo < hi) || n == 0 {
        return Err(FlowError::Invalid("need lo < hi and n > 0".into()));
    }
    if let Some(at) = locate_fixed_point(f1, lo, hi) {
        return Err(FlowError::FixedPointPresent { at });
    }
    // Orient so the generator moves points to the right; c is unchanged.
    let forward = f1.eval(lo) > lo;
    let step = |g: &LeafMap, s: f64| if forward { g.eval(s) } else { g.inverse(s) };
    let unstep = |g: &LeafMap, s: f64| if forward { g.inverse(s) } else { g.eval(s) };
    let x0 = lo;
    let x1 = step(f1, x0);
    let theta = |s: f64| (s - x0) / (x1 - x0);
    let mut s = x0;
    let mut k: i64 = 0;
    for _ in 0..n {
        s = step(f2, s);
        while s >= x1 {
            s = unstep(f1, s);
            k += 1;
        }
        while s < x0 {
            s = step(f1, s);
            k -= 1;
        }
    }
    let c = (k as f64 + theta(s)) / n as f64;
    let e = eigen_data(&b.transpose()).map_err(|err| FlowError::Invalid(err.to_string()))?;
    let (u, _) = e.unit_directions();
    if u[0] == 0.0 {
        return Err(FlowError::Invalid("expanding direction of Bᵀ is vertical".into()));
    }
    let unstable_slope = u[1] / u[0];
    let contraction_norms = (1..=30)
        .map(|m| {
            b.checked_pow(-m)
                .map(|p| {
                    let q = p.to_f64();
                    numeric::norm([q[0][0] + c * q[1][0], q[0][1] + c * q[1][1]])
                })
                .unwrap_or(f64::INFINITY)
        })
        .collect();
    Ok(LeafTranslation {
        c,
        error_bound: 1.0 / n as f64,
        unstable_slope,
        check: (c - unstable_slope).abs() < 1e-6,
        contraction_norms,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowOptions {
    pub n_modes: usize,
    pub n_iters: usize,
    /// Samples per fundamental domain for the embedding checks.
    pub n_samples: usize,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions { n_modes: 128, n_iters: 30, n_samples: 64 }
    }
}

/// `g_t = H⁻¹(H + t)` with `H = h_c ∘ k0`, where `k0` is the
/// `f₁`-equivariant coordinate glued in `C¹` across fundamental domains.
#[derive(Debug, Clone)]
pub struct LeafFlow {
    pub f1: LeafMap,
    pub x0: f64,
    pub length: f64,
    pub beta: f64,
    pub c: f64,
    pub conjugacy: CircleConjugacy,
    pub g1_mismatch: f64,
    pub gc_mismatch: f64,
    pub renormalization_defect: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowSummary {
    pub generator: String,
    pub x0: f64,
    pub length: f64,
    pub beta: f64,
    pub c: f64,
    pub g1_mismatch: f64,
    pub gc_mismatch: f64,
    pub renormalization_defect: Option<f64>,
    pub circle_conjugacy: CircleConjugacy,
}

impl LeafFlow {
    fn kappa(&self, u: f64) -> f64 {
        u + self.beta * (PI * u).sin() / PI
    }

    fn kappa_inv(&self, v: f64) -> f64 {
        let mut u = v;
        for _ in 0..60 {
            let r = self.kappa(u) - v;
            let next = u - r / (1.0 + self.beta * (PI * u).cos());
            if (next - u).abs() < 1e-16 {
                return next;
            }
            u = next;
        }
        u
    }

    /// Equivariant fundamental-domain coordinate with `k0∘f₁ = k0 + 1`.
    pub fn k0(&self, s: f64) -> f64 {
        let x1 = self.x0 + self.length;
        let (mut s, mut j) = (s, 0i64);
        while s >= x1 {
            s = self.f1.inverse(s);
            j += 1;
        }
        while s < self.x0 {
            s = self.f1.eval(s);
            j -= 1;
        }
        j as f64 + self.kappa((s - self.x0) / self.length)
    }

    pub fn k0_inv(&self, z: f64) -> f64 {
        let j = z.floor();
        let mut s = self.x0 + self.length * self.kappa_inv(z - j);
        for _ in 0..(j.abs() as i64) {
            s = if j > 0.0 { self.f1.eval(s) } else { self.f1.inverse(s) };
        }
        s
    }

    /// `H(s) = h_c(k0(s))` with `H∘f₁ = H + 1`.
    pub fn coordinate(&self, s: f64) -> f64 {
        self.conjugacy.h.eval(self.k0(s))
    }

    pub fn coordinate_inv(&self, y: f64) -> f64 {
        self.k0_inv(self.conjugacy.h.inverse(y))
    }

    pub fn eval(&self, t: f64, s: f64) -> f64 {
        self.coordinate_inv(self.coordinate(s) + t)
    }

    /// Sample points spread over the fundamental domain.
    pub fn samples(&self, n: usize) -> Vec<f64> {
        (0..n).map(|i| self.x0 + self.length * (i as f64 + 0.5) / n as f64).collect()
    }

    /// `max |g_{s+t}(p) − g_s(g_t(p))|` over random `(s, t) ∈ [−1, 1]²` and samples.
    pub fn flow_defect(&self, n_pairs: usize, seed: u64) -> f64 {
        let pts = self.samples(16);
        let mut worst: f64 = 0.0;
        for i in 0..n_pairs {
            let mut rng = numeric::indexed_rng(seed, i as u64);
            let (s, t) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            for &p in &pts {
                worst = worst.max((self.eval(s + t, p) - self.eval(s, self.eval(t, p))).abs());
            }
        }
        worst
    }

    /// `max |Φ(g_t(Φ⁻¹ p)) − g_{λt}(p)|` for `t` in a spread of `[−1, 1]`.
    pub fn renormalization(&self, phi: &LeafMap, lambda: f64, n: usize) -> f64 {
        let mut worst: f64 = 0.0;
        for &t in &[-1.0, -0.5, -0.1, 0.3, 0.7, 1.0] {
            for p in self.samples(n) {
                worst = worst.max((phi.eval(self.eval(t, phi.inverse(p))) - self.eval(lambda * t, p)).abs());
            }
        }
        worst
    }

    pub fn summary(&self) -> FlowSummary {
        FlowSummary {
            generator: self.f1.label.clone(),
            x0: self.x0,
            length: self.length,
            beta: self.beta,
            c: self.c,
            g1_mismatch: self.g1_mismatch,
            gc_mismatch: self.gc_mismatch,
            renormalization_defect: self.renormalization_defect,
            circle_conjugacy: self.conjugacy.clone(),
        }
    }
}

/// Builds the flow through `f₁` and `f₂` on the leaf starting at `x0`.
/// With an ambient leaf map `Φ_B` and its factor `λ`, the renormalization
/// law is measured too.
pub fn flow_embedding(
    f1: &LeafMap,
    f2: &LeafMap,
    c: f64,
    x0: f64,
    opts: &FlowOptions,
    ambient: Option<(&LeafMap, f64)>,
) -> Result<LeafFlow, FlowError> {
    let x1 = f1.eval(x0);
    if !(x1 > x0) {
        return Err(FlowError::Invalid("f₁ must move x0 to the right".into()));
    }
    let fp = f1.deriv(x0);
    let mut flow = LeafFlow {
        f1: f1.clone(),
        x0,
        length: x1 - x0,
        beta: (fp - 1.0) / (fp + 1.0),
        c,
        conjugacy: circle_conjugacy(&CircleLift::rigid(c), c, 1, 1)?,
        g1_mismatch: 0.0,
        gc_mismatch: 0.0,
        renormalization_defect: None,
    };
    // Circle map induced by f₂ in the k0 coordinate.
    let m = 4 * opts.n_modes;
    let disp: Vec<f64> = (0..m)
        .map(|j| {
            let z = j as f64 / m as f64;
            flow.k0(f2.eval(flow.k0_inv(z))) - z
        })
        .collect();
    let g = CircleLift::sampled(&disp)?;
    let conj = circle_conjugacy(&g, c, opts.n_modes, opts.n_iters)?;
    if conj.defect > 1e-6 {
        return Err(FlowError::EmbeddingMismatch { at: f64::NAN, error: conj.defect });
    }
    flow.conjugacy = conj;
    let pts = flow.samples(opts.n_samples);
    let worst = |g: &dyn Fn(f64) -> f64, target: &LeafMap| {
        pts.iter().map(|&p| ((g(p) - target.eval(p)).abs(), p)).fold((0.0, f64::NAN), |a, b| if b.0 > a.0 { b } else { a })
    };
    let (e1, p1) = worst(&|p| flow.eval(1.0, p), f1);
    let (ec, pc) = worst(&|p| flow.eval(c, p), f2);
    flow.g1_mismatch = e1;
    flow.gc_mismatch = ec;
    if e1 > 1e-5 || ec > 1e-5 {
        let (at, error) = if e1 >= ec { (p1, e1) } else { (pc, ec) };
        return Err(FlowError::EmbeddingMismatch { at, error });
    }
    if let Some((phi, lambda)) = ambient {
        flow.renormalization_defect = Some(flow.renormalization(phi, lambda, opts.n_samples.min(16)));
    }
    Ok(flow)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenCheck {
    pub dt: f64,
    pub max_residual: f64,
}

/// Generator `X = 2·D(dt/2) − D(dt)` with `D(h) = (g_h(p) − p)/h`, and the
/// residual `|Φ'(p) X(p) − λ X(Φ(p))|` over samples.
pub fn vector_field_eigencheck(flow: &LeafFlow, phi: &LeafMap, lambda: f64, dt: f64, n_samples: usize) -> EigenCheck {
    let x = |p: f64| {
        let d = |h: f64| (flow.eval(h, p) - p) / h;
        2.0 * d(dt / 2.0) - d(dt)
    };
    let max_residual = flow
        .samples(n_samples)
        .into_iter()
        .map(|p| (phi.deriv(p) * x(p) - lambda * x(phi.eval(p))).abs())
        .fold(0.0, f64::max);
    EigenCheck { dt, max_residual }
}
