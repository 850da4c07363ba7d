use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{read_text, CliError, Command, Run};
use crate::affine_actions::{classify, faithfulness_test, AbcAffineAction};
use crate::conjugacy::franks_conjugacy;
use crate::ergodic::{
    derivative_bound_scan, distortion_scan, entropy_inequality_check, lyapunov_exponent, srb_average, MeasureCloud, Z2Action,
};
use crate::exact_linalg::IntMatrix2;
use crate::hyperbolic::{compute_splitting, periodic_points, pingpong_certificate, semigroup_certificate, transversality_report, PingPongOptions};
use crate::leaf_flow::{
    circle_conjugacy, flow_embedding, leaf_translation_structure, rotation_number, CircleLift, FlowOptions, LeafMap,
};
use crate::numeric::Vec2;
use crate::torus_maps::{difference_hull_check, joint_rotation_sample, rotation_set, MapError, TorusLift};

fn matrix(s: &str) -> Result<IntMatrix2, CliError> {
    s.parse().map_err(CliError::config)
}

fn vec2(s: &str) -> Result<Vec2, CliError> {
    let parts: Vec<f64> = s.split(',').map(|p| p.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(CliError::config)?;
    match parts.as_slice() {
        [x, y] => Ok([*x, *y]),
        _ => Err(CliError::Config(format!("expected `x,y`, got {s:?}"))),
    }
}

fn load_map(path: &Path) -> Result<TorusLift, CliError> {
    TorusLift::from_json(&read_text(path)?).map_err(|e| match e {
        MapError::Parse(_) => CliError::Config(format!("{}: {e}", path.display())),
        other => CliError::numerical(other),
    })
}

fn load_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    serde_json::from_str(&read_text(path)?).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Leaf map description for `abc flow`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LeafSpec {
    Translation { t: f64 },
    Affine { a: f64, b: f64 },
    Circle { lift: CircleLift },
    /// `phi ∘ of ∘ phi⁻¹`.
    Conjugated { of: Box<LeafSpec>, phi: Box<LeafSpec> },
}

impl LeafSpec {
    pub fn build(&self) -> LeafMap {
        match self {
            LeafSpec::Translation { t } => LeafMap::translation(*t),
            LeafSpec::Affine { a, b } => LeafMap::affine(*a, *b),
            LeafSpec::Circle { lift } => LeafMap::from_circle(lift.clone()),
            LeafSpec::Conjugated { of, phi } => of.build().conjugate(&phi.build()),
        }
    }
}

fn histogram(values: impl Iterator<Item = f64>, lo: f64, hi: f64, bins: usize) -> Vec<usize> {
    let mut h = vec![0; bins];
    for v in values {
        let k = (((v - lo) / (hi - lo)) * bins as f64).floor().clamp(0.0, (bins - 1) as f64) as usize;
        h[k] += 1;
    }
    h
}

pub(super) fn dispatch(cmd: &Command, run: &mut Run) -> Result<(), CliError> {
    let seed = run.seed;
    match cmd {
        Command::Classify { a, b, c } => {
            let r = classify(&matrix(a)?, &matrix(b)?, &matrix(c)?).map_err(CliError::numerical)?;
            run.write_json(
                "summary.json",
                "summary",
                &json!({
                    "case": r.case,
                    "kernel_dimension": r.kernel_dimension(),
                    "rho_particular": r.rho_particular,
                    "kernel_basis": r.kernel_basis,
                    "commentary": r.commentary,
                }),
            )
        }
        Command::Faithful { action } => {
            let act = AbcAffineAction::from_json(&read_text(action)?).map_err(CliError::config)?;
            let rep = faithfulness_test(&act).map_err(CliError::numerical)?;
            run.write_json("summary.json", "summary", &json!({"rho": act.rho().map_err(CliError::numerical)?, "report": rep}))
        }
        Command::Rotset { map, iters, samples, direction } => {
            let f = load_map(map)?;
            let dir = direction.as_deref().map(vec2).transpose()?;
            let est = rotation_set(&f, *iters, *samples, seed, dir).map_err(CliError::numerical)?;
            let mut csv = String::from("x,y\n");
            let mut dat = String::from("# rotation hull vertices, closed polygon\n");
            for v in &est.hull_vertices {
                let _ = writeln!(csv, "{:e},{:e}", v[0], v[1]);
                let _ = writeln!(dat, "{:e} {:e}", v[0], v[1]);
            }
            if let Some(v) = est.hull_vertices.first() {
                let _ = writeln!(dat, "{:e} {:e}", v[0], v[1]);
            }
            let mut trend = String::from("# n diameter\n");
            for (n, d) in &est.diameter_trend {
                let _ = writeln!(trend, "{n} {d:e}");
            }
            run.write("rotset.csv", "table", &csv)?;
            run.write("rotset_hull.dat", "plot", &dat)?;
            run.write("rotset_trend.dat", "plot", &trend)?;
            run.write_json("summary.json", "summary", &est)
        }
        Command::Jointrot { f1, f2, boxes, initials, a, b, n_max } => {
            let (g1, g2) = (load_map(f1)?, load_map(f2)?);
            let sample = joint_rotation_sample(&g1, &g2, boxes, *initials, seed).map_err(CliError::numerical)?;
            let mut csv = String::from("box_size,x0,y0,r1x,r1y,r2x,r2y\n");
            for p in &sample.pairs {
                let _ = writeln!(
                    csv,
                    "{},{:e},{:e},{:e},{:e},{:e},{:e}",
                    p.box_size, p.initial[0], p.initial[1], p.r1[0], p.r1[1], p.r2[0], p.r2[1]
                );
            }
            run.write("jointrot.csv", "table", &csv)?;
            let hull = match (a, b) {
                (Some(a), Some(b)) => Some(
                    difference_hull_check(&sample, &matrix(a)?, &matrix(b)?, *n_max, 1e-9).map_err(CliError::numerical)?,
                ),
                (None, None) => None,
                _ => return Err(CliError::Config("--A and --B go together".into())),
            };
            run.write_json("summary.json", "summary", &json!({"pairs": sample.pairs.len(), "box_sizes": sample.box_sizes, "difference_hull": hull}))
        }
        Command::Franks { map, resolution, tol, out } => {
            let f = load_map(map)?;
            let r = franks_conjugacy(&f, *resolution, *tol).map_err(CliError::numerical)?;
            run.write(out, "grid", &r.h.to_grid_string())?;
            let mut dat = String::from("# sweep residual\n");
            for (k, v) in r.residual_history.iter().enumerate() {
                let _ = writeln!(dat, "{} {v:e}", k + 1);
            }
            run.write("residuals.dat", "plot", &dat)?;
            run.write_json(
                "summary.json",
                "summary",
                &json!({
                    "resolution": resolution,
                    "tol": tol,
                    "residual_sup": r.residual_sup,
                    "iterations": r.iterations,
                    "holder_alpha_estimate": r.holder_alpha_estimate,
                    "lambda": r.lambda,
                    "min_jacobian_det": r.min_jacobian_det,
                    "worst_contraction_ratio": r.worst_contraction_ratio(),
                    "grid": out,
                }),
            )
        }
        Command::Splitting { map, resolution, depth } => {
            let f = load_map(map)?;
            let s = compute_splitting(&f, *resolution, *depth).map_err(CliError::numerical)?;
            let mut csv = String::from("i,j,eux,euy,esx,esy\n");
            for (k, (u, v)) in s.e_u.iter().zip(&s.e_s).enumerate() {
                let _ = writeln!(csv, "{},{},{:e},{:e},{:e},{:e}", k % resolution, k / resolution, u[0], u[1], v[0], v[1]);
            }
            run.write("splitting.csv", "table", &csv)?;
            run.write_json(
                "summary.json",
                "summary",
                &json!({"resolution": s.resolution, "depth": s.iteration_depth, "defect": s.defect, "min_angle": s.min_angle, "expansion_rate": s.expansion_rate}),
            )
        }
        Command::Periodic { map, period } => {
            let f = load_map(map)?;
            let s = periodic_points(&f, *period, None).map_err(CliError::numerical)?;
            let mut csv = String::from("x,y,kx,ky,ev_unstable,ev_stable\n");
            for p in &s.points {
                let _ = writeln!(csv, "{:e},{:e},{},{},{:e},{:e}", p.x[0], p.x[1], p.k[0], p.k[1], p.eigenvalues[0], p.eigenvalues[1]);
            }
            run.write("periodic.csv", "table", &csv)?;
            run.write_json("summary.json", "summary", &json!({"period": period, "count": s.points.len(), "diverged": s.diverged}))
        }
        Command::Transversality { f, h, samples, depth } => {
            let (f, h) = (load_map(f)?, load_map(h)?);
            let r = transversality_report(&f, &h, *samples, *depth, seed).map_err(CliError::numerical)?;
            let mut csv = String::from("x,y,ss,su,us,uu\n");
            for s in &r.samples {
                let a = s.angles;
                let _ = writeln!(csv, "{:e},{:e},{:e},{:e},{:e},{:e}", s.x[0], s.x[1], a[0], a[1], a[2], a[3]);
            }
            let bins = 20;
            let hists: Vec<Vec<usize>> = (0..4).map(|k| histogram(r.samples.iter().map(|s| s.angles[k]), 0.0, FRAC_PI_2, bins)).collect();
            let mut dat = String::from("# bin_center ss su us uu\n");
            for b in 0..bins {
                let c = (b as f64 + 0.5) * FRAC_PI_2 / bins as f64;
                let _ = writeln!(dat, "{c:e} {} {} {} {}", hists[0][b], hists[1][b], hists[2][b], hists[3][b]);
            }
            run.write("angles.csv", "table", &csv)?;
            run.write("angle_histogram.dat", "plot", &dat)?;
            run.write_json(
                "summary.json",
                "summary",
                &json!({"classification": r.classification, "minima": r.minima, "maxima": r.maxima, "angle_threshold": r.angle_threshold}),
            )
        }
        Command::Pingpong { f, h, word_length, epsilon, delta, n_max, positive_only, out } => {
            let (f, h) = (load_map(f)?, load_map(h)?);
            let opts = PingPongOptions {
                n_range: (1, *n_max),
                word_length: *word_length,
                epsilon: *epsilon,
                delta: *delta,
                seed,
                ..PingPongOptions::default()
            };
            let cert = if *positive_only { semigroup_certificate(&f, &h, &opts) } else { pingpong_certificate(&f, &h, &opts) }
                .map_err(CliError::numerical)?;
            run.write_json(out, "certificate", &cert)?;
            run.write_json(
                "summary.json",
                "summary",
                &json!({"N": cert.n, "words_checked": cert.words_checked, "min_separation": cert.min_separation, "max_c1_distance": cert.max_c1_distance, "certificate": out}),
            )
        }
        Command::Rotnum { circle, n, x0, conjugate_to, modes, kam_iters } => {
            let g: CircleLift = load_json(circle)?;
            g.check_monotone().map_err(CliError::numerical)?;
            let r = rotation_number(&g, *n, *x0).map_err(CliError::numerical)?;
            let kam = match conjugate_to {
                Some(rho) => {
                    let k = circle_conjugacy(&g, *rho, *modes, *kam_iters).map_err(CliError::numerical)?;
                    let mut dat = String::from("# iteration defect\n");
                    for (i, d) in k.defect_history.iter().enumerate() {
                        let _ = writeln!(dat, "{i} {d:e}");
                    }
                    run.write("kam_defect.dat", "plot", &dat)?;
                    Some(json!({"rho": k.rho, "tau": k.tau, "defect": k.defect, "iterations": k.iterations}))
                }
                None => None,
            };
            run.write_json("summary.json", "summary", &json!({"rotation_number": r, "conjugacy": kam}))
        }
        Command::Flow { f1, f2, b, x0, interval, n, modes } => {
            let (s1, s2): (LeafSpec, LeafSpec) = (load_json(f1)?, load_json(f2)?);
            let (g1, g2) = (s1.build(), s2.build());
            let [lo, hi] = interval.as_slice() else {
                return Err(CliError::Config("--interval takes `lo,hi`".into()));
            };
            let lt = leaf_translation_structure(&g1, &g2, (*lo, *hi), &matrix(b)?, *n).map_err(CliError::numerical)?;
            let opts = FlowOptions { n_modes: *modes, ..FlowOptions::default() };
            let flow = flow_embedding(&g1, &g2, lt.c, *x0, &opts, None).map_err(CliError::numerical)?;
            let mut dat = String::from("# s coordinate\n");
            for s in flow.samples(200) {
                let _ = writeln!(dat, "{s:e} {:e}", flow.coordinate(s));
            }
            run.write("flow_coordinate.dat", "plot", &dat)?;
            run.write_json("summary.json", "summary", &json!({"translation": lt, "flow": flow.summary(), "flow_defect": flow.flow_defect(64, seed)}))
        }
        Command::Lyapunov { map, orbits, length } => {
            let f = load_map(map)?;
            let est = lyapunov_exponent(&f, *orbits, *length, seed).map_err(CliError::numerical)?;
            let a = f.linear_part();
            let entropy = if a.is_anosov() { Some(entropy_inequality_check(&a, &est).map_err(CliError::numerical)?) } else { None };
            run.write_json("summary.json", "summary", &json!({"estimate": est, "entropy": entropy}))
        }
        Command::SrbAverage { action, b, n, dirac, birkhoff, samples, bins } => {
            let act: Z2Action = load_json(action)?;
            let initial = match (dirac, birkhoff) {
                (Some(p), None) => MeasureCloud::dirac(vec2(p)?),
                (None, Some(m)) => MeasureCloud::birkhoff(&load_map(m)?, [0.1234, 0.5678], *samples).map_err(CliError::numerical)?,
                _ => return Err(CliError::Config("give exactly one of --dirac or --birkhoff".into())),
            };
            let cloud = srb_average(&act, &matrix(b)?, *n, &initial).map_err(CliError::numerical)?;
            run.write("cloud.csv", "table", &cloud.to_csv())?;
            let mass = cloud.histogram(*bins);
            let rows: Vec<&[f64]> = mass.chunks(*bins).collect();
            let deviation = cloud.deviation_from_uniform(*bins);
            run.write_json("histogram.json", "histogram", &json!({"bins": bins, "row_major_y": true, "mass": rows, "l1_deviation": deviation}))?;
            run.write_json(
                "summary.json",
                "summary",
                &json!({"N": n, "points": cloud.points.len(), "total_weight": cloud.total_weight(), "l1_deviation": deviation, "provenance": cloud.provenance}),
            )
        }
        Command::Scans { map, action, b, n_max, grid, alphas, pairs } => {
            let f = load_map(map)?;
            let act: Z2Action = load_json(action)?;
            let bm = matrix(b)?;
            let scan = derivative_bound_scan(&f, &act, &bm, [1, 0], *n_max, *grid).map_err(CliError::numerical)?;
            let mut dat = String::from("# n min_du max_du\n");
            for (k, lo, hi) in &scan.per_n {
                let _ = writeln!(dat, "{k} {lo:e} {hi:e}");
            }
            run.write("derivative_scan.dat", "plot", &dat)?;
            let ns = [(*n_max / 2).max(1), *n_max];
            let dist = alphas
                .iter()
                .map(|a| distortion_scan(&f, &act, &bm, [1, 0], *a, &ns, *pairs, seed))
                .collect::<Result<Vec<_>, _>>()
                .map_err(CliError::numerical)?;
            let mut csv = String::from("alpha,C\n");
            for d in &dist {
                let _ = writeln!(csv, "{:e},{:e}", d.alpha, d.c);
            }
            run.write("distortion.csv", "table", &csv)?;
            run.write_json("summary.json", "summary", &json!({"K": scan.k, "growing": scan.growing, "distortion": dist}))
        }
        Command::Report { .. } => Err(CliError::Config("report is handled before dispatch".into())),
    }
}
