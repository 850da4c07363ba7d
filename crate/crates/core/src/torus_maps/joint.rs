use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{MapError, TorusLift};
use crate::affine_actions::AbcAffineAction;
use crate::exact_linalg::{IntMatrix2, QuadMatrix};
use crate::numeric::{self, Kahan, Mat2, Vec2};

const COMMUTE_TOL: f64 = 1e-9;

fn check_identity_homotopic(f: &TorusLift) -> Result<(), MapError> {
    if f.linear_part() != IntMatrix2::IDENTITY {
        return Err(MapError::NotHomotopicToIdentity(f.linear_part()));
    }
    Ok(())
}

/// The integer `k` with `F1 F2 F1⁻¹ F2⁻¹ = id + k`, checked at 10 random points.
pub fn commutator_defect(f1: &TorusLift, f2: &TorusLift) -> Result<[i64; 2], MapError> {
    check_identity_homotopic(f1)?;
    check_identity_homotopic(f2)?;
    let comm = |x: Vec2| -> Result<Vec2, MapError> {
        let y = f2.inverse_eval(x)?;
        let y = f1.inverse_eval(y)?;
        let y = f2.eval(y)?;
        Ok(numeric::sub(f1.eval(y)?, x))
    };
    let d0 = comm([0.0, 0.0])?;
    let k = [d0[0].round(), d0[1].round()];
    let mut rng = numeric::indexed_rng(0x636f_6d6d, 0);
    let mut probes = vec![[0.0, 0.0]];
    probes.extend((0..10).map(|_| [rng.gen::<f64>(), rng.gen::<f64>()]));
    for x in probes {
        let d = comm(x)?;
        let dev = numeric::norm(numeric::sub(d, k));
        if dev > COMMUTE_TOL {
            return Err(MapError::NonConstantDefect { at: x, deviation: dev });
        }
    }
    Ok([k[0] as i64, k[1] as i64])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointPair {
    pub box_size: usize,
    pub initial: Vec2,
    /// Averaged displacement of the first generator.
    pub r1: Vec2,
    /// Averaged displacement of the second generator.
    pub r2: Vec2,
}

impl JointPair {
    /// The pair as a 2×2 matrix with columns `r1`, `r2`.
    pub fn matrix(&self) -> Mat2 {
        [[self.r1[0], self.r2[0]], [self.r1[1], self.r2[1]]]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointRotationSample {
    pub pairs: Vec<JointPair>,
    pub box_sizes: Vec<usize>,
}

/// Følner-box averages of both generators' displacements.
pub fn joint_rotation_sample(
    f1: &TorusLift,
    f2: &TorusLift,
    box_sizes: &[usize],
    n_initials: usize,
    seed: u64,
) -> Result<JointRotationSample, MapError> {
    check_identity_homotopic(f1)?;
    check_identity_homotopic(f2)?;
    let mut rng = numeric::indexed_rng(seed, u64::MAX);
    for _ in 0..10 {
        let x = [rng.gen::<f64>(), rng.gen::<f64>()];
        let a = f1.eval(f2.eval(x)?)?;
        let b = f2.eval(f1.eval(x)?)?;
        let defect = numeric::norm(numeric::sub(a, b));
        if defect > COMMUTE_TOL {
            return Err(MapError::NonCommuting { at: x, defect });
        }
    }
    let jobs: Vec<(usize, usize)> =
        box_sizes.iter().flat_map(|&l| (0..n_initials).map(move |i| (l, i))).collect();
    let pairs = jobs
        .par_iter()
        .map(|&(l, i)| {
            let mut r = numeric::indexed_rng(seed, i as u64);
            let x0 = [r.gen::<f64>(), r.gen::<f64>()];
            box_average(f1, f2, x0, l)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(JointRotationSample { pairs, box_sizes: box_sizes.to_vec() })
}

fn box_average(f1: &TorusLift, f2: &TorusLift, x0: Vec2, l: usize) -> Result<JointPair, MapError> {
    let mut acc = [Kahan::new(), Kahan::new(), Kahan::new(), Kahan::new()];
    let mut row = x0;
    for _ in 0..l {
        let mut x = row;
        for _ in 0..l {
            let y1 = f1.eval(x)?;
            let d1 = numeric::sub(y1, x);
            let d2 = numeric::sub(f2.eval(x)?, x);
            acc[0].add(d1[0]);
            acc[1].add(d1[1]);
            acc[2].add(d2[0]);
            acc[3].add(d2[1]);
            x = y1;
        }
        row = f2.eval(row)?;
    }
    let n = (l * l) as f64;
    Ok(JointPair {
        box_size: l,
        initial: x0,
        r1: [acc[0].value() / n, acc[1].value() / n],
        r2: [acc[2].value() / n, acc[3].value() / n],
    })
}

/// Translations by the two columns of ρ.
pub fn translation_pair(rho: &QuadMatrix) -> (TorusLift, TorusLift) {
    let r = rho.to_mat2();
    (TorusLift::translation([r[0][0], r[1][0]]), TorusLift::translation([r[0][1], r[1][1]]))
}

/// The integer matrix `W = ρ - AρB⁻¹`, verified exactly.
pub fn affine_transformation_check(action: &AbcAffineAction) -> Result<IntMatrix2, MapError> {
    let rho = action.rho().map_err(|e| MapError::Invalid(e.to_string()))?;
    let q = |m: &IntMatrix2| m.to_quad();
    let b_inv = action.b.inverse().map_err(|e| MapError::Invalid(e.to_string()))?;
    let w = q(&action.a)
        .checked_mul(&rho)
        .and_then(|x| x.checked_mul(&q(&b_inv)))
        .and_then(|x| rho.checked_sub(&x))
        .map_err(|e| MapError::Invalid(e.to_string()))?;
    if !w.is_integral() {
        return Err(MapError::Invalid(format!("ρ - AρB⁻¹ = {w:?} is not integral")));
    }
    let e = |i, j| w.get(i, j).a().numer().try_into().unwrap_or(i64::MAX);
    Ok(IntMatrix2::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifferenceHullCheck {
    /// Largest coordinate excess of `Aⁿ(R₁ - R₂)B⁻ⁿ` over the bounding box
    /// of sampled differences in `R^4`.
    pub max_excess: f64,
    pub holds: bool,
    pub n_max: u32,
}

/// Checks that `Aⁿ(R₁ - R₂)B⁻ⁿ` stays inside the sampled difference set.
pub fn difference_hull_check(
    sample: &JointRotationSample,
    a: &IntMatrix2,
    b: &IntMatrix2,
    n_max: u32,
    tol: f64,
) -> Result<DifferenceHullCheck, MapError> {
    let mats: Vec<Mat2> = sample.pairs.iter().map(JointPair::matrix).collect();
    let mut diffs = Vec::with_capacity(mats.len() * mats.len());
    for p in &mats {
        for q in &mats {
            diffs.push([[p[0][0] - q[0][0], p[0][1] - q[0][1]], [p[1][0] - q[1][0], p[1][1] - q[1][1]]]);
        }
    }
    let mut lo = [[f64::INFINITY; 2]; 2];
    let mut hi = [[f64::NEG_INFINITY; 2]; 2];
    for d in &diffs {
        for i in 0..2 {
            for j in 0..2 {
                lo[i][j] = lo[i][j].min(d[i][j]);
                hi[i][j] = hi[i][j].max(d[i][j]);
            }
        }
    }
    let mut max_excess: f64 = 0.0;
    for n in 0..=n_max {
        let an = a.checked_pow(n as i64).ok_or(MapError::Invalid("A^n overflows".into()))?.to_f64();
        let bn = b.checked_pow(-(n as i64)).ok_or(MapError::Invalid("B^-n overflows".into()))?.to_f64();
        for d in &diffs {
            let t = numeric::mat_mul(&numeric::mat_mul(&an, d), &bn);
            for i in 0..2 {
                for j in 0..2 {
                    max_excess = max_excess.max(lo[i][j] - t[i][j]).max(t[i][j] - hi[i][j]);
                }
            }
        }
    }
    Ok(DifferenceHullCheck { max_excess, holds: max_excess <= tol, n_max })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affine_actions::KernelBasis;
    use crate::exact_linalg::Rational;

    fn action() -> AbcAffineAction {
        let cat = IntMatrix2::new(2, 1, 1, 1);
        AbcAffineAction::with_basis(
            cat,
            cat,
            IntMatrix2::new(0, 0, 0, 0),
            Rational::new(1, 5),
            Rational::new(1, 7),
            KernelBasis::Eigen,
        )
        .unwrap()
    }

    #[test]
    fn translations_commute_trivially() {
        let (a, b) = (TorusLift::translation([0.3, 0.1]), TorusLift::translation([0.7, 0.2]));
        assert_eq!(commutator_defect(&a, &b).unwrap(), [0, 0]);
    }

    #[test]
    fn conjugated_translation_commutes() {
        // h commutes with T_(ρ1) when the shear only depends on y and ρ1 = (s, 0).
        let h = TorusLift::shear(0.1);
        let f1 = TorusLift::translation([0.37, 0.0]);
        let f2 = TorusLift::compose(TorusLift::inverse(h.clone()), TorusLift::compose(TorusLift::translation([0.2, 0.3]), h));
        assert_eq!(commutator_defect(&f1, &f2).unwrap(), [0, 0]);
    }

    #[test]
    fn generic_maps_fail_honestly() {
        let f1 = TorusLift::trig(IntMatrix2::IDENTITY, [0.1, 0.0], vec![crate::torus_maps::TrigTerm::sin([0.0, 0.05], [1, 0])]).unwrap();
        let f2 = TorusLift::shear(0.07);
        assert!(matches!(commutator_defect(&f1, &f2), Err(MapError::NonConstantDefect { .. })));
        assert!(matches!(joint_rotation_sample(&f1, &f2, &[4], 2, 0), Err(MapError::NonCommuting { .. })));
    }

    #[test]
    fn affine_joint_sample_equals_rho() {
        let act = action();
        let rho = act.rho().unwrap();
        let (f1, f2) = translation_pair(&rho);
        let s = joint_rotation_sample(&f1, &f2, &[4, 8], 3, 11).unwrap();
        let r = rho.to_mat2();
        for p in &s.pairs {
            let m = p.matrix();
            for i in 0..2 {
                for j in 0..2 {
                    assert!((m[i][j] - r[i][j]).abs() < 1e-12);
                }
            }
        }
        let chk = difference_hull_check(&s, &act.a, &act.b, 5, 1e-9).unwrap();
        assert!(chk.holds);
        assert_eq!(affine_transformation_check(&act).unwrap(), IntMatrix2::new(0, 0, 0, 0));
    }
}
