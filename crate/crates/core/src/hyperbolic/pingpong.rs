use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::disk::{self, Axis, Chart, Disk, Graph, MapFn};
use super::periodic::{iterate_jac, periodic_points};
use super::splitting::linear_directions;
use super::transversality::{transversality_report, ANGLE_THRESHOLD};
use super::HypError;
use crate::numeric::{self, Mat2, Vec2};
use crate::torus_maps::TorusLift;

/// Generators `a = f₁^N`, `b = f₂^N` and their inverses `A`, `B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Letter {
    #[serde(rename = "a")]
    A,
    #[serde(rename = "A")]
    AInv,
    #[serde(rename = "b")]
    B,
    #[serde(rename = "B")]
    BInv,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::A, Letter::AInv, Letter::B, Letter::BInv];

    pub fn generator(self) -> usize {
        match self {
            Letter::A | Letter::AInv => 0,
            Letter::B | Letter::BInv => 1,
        }
    }

    pub fn forward(self) -> bool {
        matches!(self, Letter::A | Letter::B)
    }

    pub fn inverse(self) -> Letter {
        match self {
            Letter::A => Letter::AInv,
            Letter::AInv => Letter::A,
            Letter::B => Letter::BInv,
            Letter::BInv => Letter::B,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Letter::A => 'a',
            Letter::AInv => 'A',
            Letter::B => 'b',
            Letter::BInv => 'B',
        }
    }
}

pub fn word_string(w: &[Letter]) -> String {
    w.iter().map(|l| l.symbol()).collect()
}

/// Reduced words of length `1..=max_len`, sorted by their spelling.
/// With `positive_only` the alphabet is `{a, b}`.
pub fn reduced_words(max_len: usize, positive_only: bool) -> Vec<Vec<Letter>> {
    let alphabet: Vec<Letter> =
        if positive_only { vec![Letter::A, Letter::B] } else { Letter::ALL.to_vec() };
    let mut out = Vec::new();
    let mut layer: Vec<Vec<Letter>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for &l in &alphabet {
                if w.last().is_some_and(|&p| p == l.inverse()) {
                    continue;
                }
                let mut v = w.clone();
                v.push(l);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out.sort_by_key(|w| word_string(w));
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PingPongOptions {
    /// Inclusive range for the power `N`.
    pub n_range: (usize, usize),
    pub word_length: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub transversality_samples: usize,
    pub depth: usize,
    pub seed: u64,
}

impl Default for PingPongOptions {
    fn default() -> Self {
        PingPongOptions {
            n_range: (1, 1 << 10),
            word_length: 4,
            epsilon: 0.01,
            delta: 0.05,
            transversality_samples: 64,
            depth: 30,
            seed: 0,
        }
    }
}

/// Tracking record of one word.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordEvidence {
    pub word: String,
    /// Manifold the final disk should shadow, e.g. `"W^u(f1)"`.
    pub predicted: String,
    /// C¹ distance to the predicted manifold after each letter, rightmost first.
    pub c1_distances: Vec<f64>,
    /// Crossing angle with the expected manifold before each letter.
    pub crossing_angles: Vec<f64>,
    /// Distance from the tracked disk to the four local manifolds at the end.
    pub manifold_distances: [f64; 4],
    /// Directed C⁰ distance from the tracked disk to the test set.
    pub separation: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PingPongCertificate {
    #[serde(rename = "N")]
    pub n: usize,
    pub p1: Vec2,
    pub p2: Vec2,
    pub delta: f64,
    pub epsilon: f64,
    pub word_length_l: usize,
    pub positive_only: bool,
    pub words_checked: usize,
    pub min_separation: f64,
    pub max_c1_distance: f64,
    /// Angles `ss, su, us, uu` between the frames at `p1` and `p2`.
    pub frame_angles: [f64; 4],
    pub tried: Vec<usize>,
    pub c1_metric: String,
    pub cone_evidence: Vec<WordEvidence>,
}

/// `f₁ = f^N` and `f₂ = h f^N h⁻¹` with charts and local manifolds.
struct System<'a> {
    f: &'a TorusLift,
    h: &'a TorusLift,
    n: usize,
    charts: [Chart; 2],
    delta: f64,
}

impl System<'_> {
    fn apply(&self, gen: usize, forward: bool, x: Vec2) -> Result<(Vec2, Mat2), HypError> {
        let mut y = x;
        let mut j = numeric::IDENTITY2;
        if gen == 1 {
            let (z, d) = self.h.inverse_eval_jac(y)?;
            y = z;
            j = d;
        }
        for _ in 0..self.n {
            let (z, d) = if forward { self.f.eval_jac(y)? } else { self.f.inverse_eval_jac(y)? };
            // Integer shifts are irrelevant once points are read in a chart.
            y = numeric::mod1(z);
            j = numeric::mat_mul(&d, &j);
        }
        if gen == 1 {
            let (z, d) = self.h.eval_jac(y)?;
            y = z;
            j = numeric::mat_mul(&d, &j);
        }
        Ok((numeric::mod1(y), j))
    }

    /// Pushes needed for the local manifolds to settle to double precision.
    fn growth_reps(&self, lambda: f64) -> usize {
        ((36.0 / (2.0 * self.n as f64 * lambda.ln())).ceil() as usize).clamp(2, 60)
    }
}

/// Unit `(E_u, E_s)` of `Dg(p)` for a map `g` with `g(p) = p`.
fn eigenframe(j: &Mat2) -> Result<(Vec2, Vec2, f64), HypError> {
    let (ev, real) = numeric::eigenvalues(j);
    if !real || ev[0].abs() <= 1.0 {
        return Err(HypError::ConeCriterionFailed("fixed point is not a saddle".into()));
    }
    let eu = numeric::eigenvector(j, ev[0]);
    let inv = numeric::mat_inv(j);
    let (evi, _) = numeric::eigenvalues(&inv);
    let es = numeric::eigenvector(&inv, evi[0]);
    Ok((eu, es, ev[0].abs()))
}

struct Setup {
    p1: Vec2,
    p2: Vec2,
    frames: [(Vec2, Vec2); 2],
    lambda: f64,
    frame_angles: [f64; 4],
}

/// Fixed points `p₁` of `f` and `p₂ = h(p')` of `h f h⁻¹`, chosen closest.
fn choose_points(f: &TorusLift, h: &TorusLift) -> Result<Setup, HypError> {
    let fixed = periodic_points(f, 1, None)?;
    let mut best: Option<(f64, Vec2, Vec2)> = None;
    for p in &fixed.points {
        for q in &fixed.points {
            let hq = numeric::mod1(h.eval(q.x)?);
            let d = numeric::torus_dist(p.x, hq);
            if best.is_none_or(|b| d < b.0) {
                best = Some((d, p.x, q.x));
            }
        }
    }
    let (_, p1, q) = best.ok_or(HypError::EmptyResult)?;
    let (_, j1) = iterate_jac(f, p1, 1)?;
    let (eu1, es1, lambda) = eigenframe(&j1)?;
    let (_, jq) = iterate_jac(f, q, 1)?;
    let (euq, esq, _) = eigenframe(&jq)?;
    let (p2, dh) = h.eval_jac(q)?;
    let eu2 = numeric::normalize(numeric::mat_vec(&dh, euq));
    let es2 = numeric::normalize(numeric::mat_vec(&dh, esq));
    let frame_angles = [
        numeric::line_angle(es2, es1),
        numeric::line_angle(es2, eu1),
        numeric::line_angle(eu2, es1),
        numeric::line_angle(eu2, eu1),
    ];
    Ok(Setup { p1, p2: numeric::mod1(p2), frames: [(eu1, es1), (eu2, es2)], lambda, frame_angles })
}

struct Manifolds {
    wu: [Graph; 2],
    ws: [Graph; 2],
    test_set: Vec<Disk>,
}

fn build_manifolds(sys: &System<'_>, lambda: f64, positive_only: bool) -> Result<Manifolds, HypError> {
    let reps = sys.growth_reps(lambda);
    let mut wu = Vec::new();
    let mut ws = Vec::new();
    for g in 0..2 {
        let fwd = |x: Vec2| sys.apply(g, true, x);
        let bwd = |x: Vec2| sys.apply(g, false, x);
        wu.push(disk::grow_manifold(&fwd, sys.charts[g], Axis::U, sys.delta, reps)?.1);
        ws.push(disk::grow_manifold(&bwd, sys.charts[g], Axis::S, sys.delta, reps)?.1);
    }
    let d = sys.delta;
    let mut test_set = Vec::new();
    for g in 0..2 {
        test_set.push(start_disk(&sys.charts[g], true, d));
        if !positive_only {
            test_set.push(start_disk(&sys.charts[g], false, d));
        }
    }
    let [wu0, wu1]: [Graph; 2] = wu.try_into().expect("two generators");
    let [ws0, ws1]: [Graph; 2] = ws.try_into().expect("two generators");
    Ok(Manifolds { wu: [wu0, wu1], ws: [ws0, ws1], test_set })
}

/// `D^s = {|u| ≤ δ/4, s = δ/2}` crosses `W^s`; `D^u = {u = δ/2, |s| ≤ δ/4}` crosses `W^u`.
fn start_disk(chart: &Chart, forward: bool, delta: f64) -> Disk {
    if forward {
        chart.segment([0.0, delta / 2.0], [1.0, 0.0], delta / 4.0, 101)
    } else {
        chart.segment([delta / 2.0, 0.0], [0.0, 1.0], delta / 4.0, 101)
    }
}

fn manifold_name(gen: usize, unstable: bool) -> String {
    format!("W^{}(f{})", if unstable { 'u' } else { 's' }, gen + 1)
}

fn track_word(sys: &System<'_>, m: &Manifolds, word: &[Letter], epsilon: f64) -> Result<WordEvidence, HypError> {
    let first = *word.last().expect("nonempty word");
    let mut cur = start_disk(&sys.charts[first.generator()], first.forward(), sys.delta);
    let mut c1_distances = Vec::with_capacity(word.len());
    let mut crossing_angles = Vec::with_capacity(word.len());
    for &letter in word.iter().rev() {
        let g = letter.generator();
        let target = if letter.forward() { &m.ws[g] } else { &m.wu[g] };
        let name = manifold_name(g, !letter.forward());
        let c = disk::crossing(&cur, target)
            .ok_or_else(|| HypError::ManifoldTrackingLoss(format!("{}: no crossing with {name}", word_string(word))))?;
        if c.angle < ANGLE_THRESHOLD {
            return Err(HypError::LostTransversality(format!(
                "{}: crossing angle {:.3e} with {name}",
                word_string(word),
                c.angle
            )));
        }
        crossing_angles.push(c.angle);
        let map = |x: Vec2| sys.apply(g, letter.forward(), x);
        let pushed = disk::push_window(&cur, &sys.charts[g], c.sigma, &map, &sys.charts[g], sys.delta)?;
        cur = pushed.disk;
        let predicted = if letter.forward() { &m.wu[g] } else { &m.ws[g] };
        c1_distances.push(disk::c1_distance(&cur, predicted));
    }
    let last = word[0];
    let manifold_distances = [
        disk::c1_distance(&cur, &m.wu[0]),
        disk::c1_distance(&cur, &m.ws[0]),
        disk::c1_distance(&cur, &m.wu[1]),
        disk::c1_distance(&cur, &m.ws[1]),
    ];
    let separation = disk::directed_distance(&cur, &m.test_set);
    let final_c1 = *c1_distances.last().expect("nonempty");
    Ok(WordEvidence {
        word: word_string(word),
        predicted: manifold_name(last.generator(), last.forward()),
        passed: final_c1 < epsilon && separation > 0.0,
        c1_distances,
        crossing_angles,
        manifold_distances,
        separation,
    })
}

fn certify(f: &TorusLift, h: &TorusLift, opts: &PingPongOptions, positive_only: bool) -> Result<PingPongCertificate, HypError> {
    if opts.word_length == 0 || opts.n_range.0 > opts.n_range.1 || !(opts.delta > 0.0 && opts.delta < 0.25) {
        return Err(HypError::Invalid("need L ≥ 1, a nonempty N range and 0 < δ < 1/4".into()));
    }
    let setup = choose_points(f, h)?;
    let words = reduced_words(opts.word_length, positive_only);
    let mut tried = Vec::new();
    let mut reason = String::from("empty search range");
    // Both points are fixed, so the period lcm is 1.
    let mut n = opts.n_range.0.max(1);
    while n <= opts.n_range.1 {
        tried.push(n);
        let sys = System {
            f,
            h,
            n,
            charts: [
                Chart::new(setup.p1, setup.frames[0].0, setup.frames[0].1),
                Chart::new(setup.p2, setup.frames[1].0, setup.frames[1].1),
            ],
            delta: opts.delta,
        };
        let attempt = build_manifolds(&sys, setup.lambda, positive_only).and_then(|m| {
            words.par_iter().map(|w| track_word(&sys, &m, w, opts.epsilon)).collect::<Result<Vec<_>, HypError>>()
        });
        match attempt {
            Ok(evidence) => {
                if let Some(bad) = evidence.iter().find(|e| !e.passed) {
                    reason = format!(
                        "N = {n}: word {} has C¹ distance {:.3e}, separation {:.3e}",
                        bad.word,
                        bad.c1_distances.last().copied().unwrap_or(f64::NAN),
                        bad.separation
                    );
                } else {
                    return Ok(PingPongCertificate {
                        n,
                        p1: setup.p1,
                        p2: setup.p2,
                        delta: opts.delta,
                        epsilon: opts.epsilon,
                        word_length_l: opts.word_length,
                        positive_only,
                        words_checked: evidence.len(),
                        min_separation: evidence.iter().map(|e| e.separation).fold(f64::INFINITY, f64::min),
                        max_c1_distance: evidence
                            .iter()
                            .map(|e| *e.c1_distances.last().expect("nonempty"))
                            .fold(0.0, f64::max),
                        frame_angles: setup.frame_angles,
                        tried,
                        c1_metric: "max over samples of position gap + tangent angle".into(),
                        cone_evidence: evidence,
                    });
                }
            }
            Err(e) => reason = format!("N = {n}: {e}"),
        }
        n *= 2;
    }
    Err(HypError::NoValidN { tried, reason })
}

/// Bounded ping-pong certificate for `f^N` and `h f^N h⁻¹`.
pub fn pingpong_certificate(f: &TorusLift, h: &TorusLift, opts: &PingPongOptions) -> Result<PingPongCertificate, HypError> {
    linear_directions(f)?;
    let report = transversality_report(f, h, opts.transversality_samples, opts.depth, opts.seed)?;
    if !report.is_branch2() {
        return Err(HypError::PreconditionFailed(format!(
            "transversality report is {:?}, not a transverse point",
            report.classification
        )));
    }
    certify(f, h, opts, false)
}

/// Positive-word variant needing only `Dh·E^u ⋔ E^u` somewhere.
pub fn semigroup_certificate(f: &TorusLift, h: &TorusLift, opts: &PingPongOptions) -> Result<PingPongCertificate, HypError> {
    linear_directions(f)?;
    let report = transversality_report(f, h, opts.transversality_samples, opts.depth, opts.seed)?;
    if report.maxima[3] <= ANGLE_THRESHOLD {
        return Err(HypError::PreconditionFailed(format!(
            "Dh·E^u stays within {:.3e} of E^u",
            report.maxima[3]
        )));
    }
    certify(f, h, opts, true)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InclinationReport {
    pub c1_distance_trend: Vec<f64>,
    pub decreasing: bool,
    pub crossing_angle: f64,
}

/// Iterates `disk` under `f` near the fixed point `p`, reclipping to the
/// `delta`-box, and records its C¹ distance to `W^u(p, δ)`.
pub fn inclination_check(f: &TorusLift, p: Vec2, disk: &Disk, n: usize, delta: f64) -> Result<InclinationReport, HypError> {
    let (fp, j) = iterate_jac(f, p, 1)?;
    if numeric::torus_dist(fp, p) > 1e-9 {
        return Err(HypError::PreconditionFailed(format!("{p:?} is not a fixed point")));
    }
    if disk.len() < 2 {
        return Err(HypError::Invalid("disk needs at least two jets".into()));
    }
    let (eu, es, lambda) = eigenframe(&j)?;
    let chart = Chart::new(p, eu, es);
    let fwd = |x: Vec2| -> Result<(Vec2, Mat2), HypError> {
        let (y, d) = f.eval_jac(x)?;
        Ok((numeric::mod1(y), d))
    };
    let bwd = |x: Vec2| -> Result<(Vec2, Mat2), HypError> {
        let (y, d) = f.inverse_eval_jac(x)?;
        Ok((numeric::mod1(y), d))
    };
    let reps = ((36.0 / (2.0 * lambda.ln())).ceil() as usize).clamp(2, 60);
    let (_, wu) = disk::grow_manifold(&fwd as &MapFn<'_>, chart, Axis::U, delta, reps)?;
    let (_, ws) = disk::grow_manifold(&bwd as &MapFn<'_>, chart, Axis::S, delta, reps)?;
    let mut cur = disk.clone();
    let mut trend = Vec::with_capacity(n);
    let mut first_angle = f64::NAN;
    for k in 0..n {
        let c = disk::crossing(&cur, &ws)
            .ok_or_else(|| HypError::LostTransversality(format!("iterate {k}: no crossing with W^s")))?;
        if c.angle < ANGLE_THRESHOLD {
            return Err(HypError::LostTransversality(format!("iterate {k}: crossing angle {:.3e}", c.angle)));
        }
        if k == 0 {
            first_angle = c.angle;
        }
        cur = disk::push_window(&cur, &chart, c.sigma, &fwd, &chart, delta)?.disk;
        trend.push(disk::c1_distance(&cur, &wu));
    }
    let decreasing = trend.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9) + 1e-12);
    Ok(InclinationReport { c1_distance_trend: trend, decreasing, crossing_angle: first_angle })
}


#[cfg(test)]
mod full {
    use super::*;

    #[test]
    fn shear_pingpong_length_three() {
        let opts = PingPongOptions { word_length: 3, ..Default::default() };
        let c = pingpong_certificate(&TorusLift::cat(), &TorusLift::shear(0.3), &opts).unwrap();
        assert_eq!(c.words_checked, 52);
        assert!(c.n <= 12, "N = {}", c.n);
        assert!(c.min_separation > 0.0);
        assert!(c.max_c1_distance < opts.epsilon);
        for e in &c.cone_evidence {
            assert!(e.predicted.starts_with("W^"));
        }
    }
}
