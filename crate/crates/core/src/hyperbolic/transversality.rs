use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::splitting::{stable_direction, unstable_direction};
use super::HypError;
use crate::numeric::{self, Vec2};
use crate::torus_maps::{stratified_point, TorusLift};

pub const ANGLE_THRESHOLD: f64 = 1e-3;
pub const COLLAPSE_THRESHOLD: f64 = 1e-6;

/// Which image line is compared with which target line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Foliation {
    /// `Dh·E^s ∥ E^s`.
    Stable,
    /// `Dh·E^u ∥ E^u`.
    Unstable,
    /// `Dh·E^s ∥ E^u`.
    StableToUnstable,
    /// `Dh·E^u ∥ E^s`.
    UnstableToStable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "branch")]
pub enum Classification {
    Branch1PreservesFoliation { which: Vec<Foliation> },
    Branch2TransversePoint { x: Vec2 },
    Inconclusive { largest_min_angle_at: Vec2, largest_min_angle: f64 },
}

/// Angles at one sample, ordered `ss, su, us, uu`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleSample {
    pub x: Vec2,
    pub angles: [f64; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransversalityReport {
    pub samples: Vec<AngleSample>,
    /// Minimum over samples of each of the four angles.
    pub minima: [f64; 4],
    /// Maximum over samples of each of the four angles.
    pub maxima: [f64; 4],
    pub classification: Classification,
    pub angle_threshold: f64,
    pub collapse_threshold: f64,
}

impl TransversalityReport {
    pub fn is_branch2(&self) -> bool {
        matches!(self.classification, Classification::Branch2TransversePoint { .. })
    }

    pub fn is_branch1(&self) -> bool {
        matches!(self.classification, Classification::Branch1PreservesFoliation { .. })
    }
}

/// Compares `Dh·E^{s,u}_f(x)` with `E^{s,u}_f(h x)` at stratified samples.
pub fn transversality_report(
    f: &TorusLift,
    h: &TorusLift,
    n_samples: usize,
    depth: usize,
    seed: u64,
) -> Result<TransversalityReport, HypError> {
    if n_samples == 0 {
        return Err(HypError::Invalid("n_samples must be positive".into()));
    }
    let side = (n_samples as f64).sqrt().ceil() as usize;
    let samples = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let x = stratified_point(seed, i, side);
            let (hx, dh) = h.eval_jac(x)?;
            let hx = numeric::mod1(hx);
            let es = numeric::mat_vec(&dh, stable_direction(f, x, depth)?);
            let eu = numeric::mat_vec(&dh, unstable_direction(f, x, depth)?);
            let ts = stable_direction(f, hx, depth)?;
            let tu = unstable_direction(f, hx, depth)?;
            Ok(AngleSample {
                x,
                angles: [
                    numeric::line_angle(es, ts),
                    numeric::line_angle(es, tu),
                    numeric::line_angle(eu, ts),
                    numeric::line_angle(eu, tu),
                ],
            })
        })
        .collect::<Result<Vec<_>, HypError>>()?;
    let mut minima = [f64::INFINITY; 4];
    let mut maxima = [0.0f64; 4];
    for s in &samples {
        for k in 0..4 {
            minima[k] = minima[k].min(s.angles[k]);
            maxima[k] = maxima[k].max(s.angles[k]);
        }
    }
    let order = [Foliation::Stable, Foliation::StableToUnstable, Foliation::UnstableToStable, Foliation::Unstable];
    let collapsed: Vec<Foliation> =
        (0..4).filter(|&k| maxima[k] < COLLAPSE_THRESHOLD).map(|k| order[k]).collect();
    let best = samples
        .iter()
        .map(|s| (s.angles.iter().copied().fold(f64::INFINITY, f64::min), s.x))
        .fold((f64::NEG_INFINITY, [0.0, 0.0]), |a, b| if b.0 > a.0 { b } else { a });
    let classification = if !collapsed.is_empty() {
        Classification::Branch1PreservesFoliation { which: collapsed }
    } else if best.0 > ANGLE_THRESHOLD {
        Classification::Branch2TransversePoint { x: best.1 }
    } else {
        Classification::Inconclusive { largest_min_angle_at: best.1, largest_min_angle: best.0 }
    };
    Ok(TransversalityReport {
        samples,
        minima,
        maxima,
        classification,
        angle_threshold: ANGLE_THRESHOLD,
        collapse_threshold: COLLAPSE_THRESHOLD,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_linalg::IntMatrix2;

    #[test]
    fn identity_and_translation_preserve_both() {
        let f = TorusLift::cat();
        for h in [TorusLift::identity(), TorusLift::translation([0.3, 0.1])] {
            let r = transversality_report(&f, &h, 16, 20, 1).unwrap();
            let Classification::Branch1PreservesFoliation { which } = r.classification else { panic!() };
            assert!(which.contains(&Foliation::Stable) && which.contains(&Foliation::Unstable));
        }
    }

    #[test]
    fn commuting_affine_preserves() {
        let f = TorusLift::cat();
        let h = TorusLift::affine(IntMatrix2::new(2, 1, 1, 1), [0.25, 0.5]).unwrap();
        assert!(transversality_report(&f, &h, 16, 20, 1).unwrap().is_branch1());
    }

    #[test]
    fn shear_is_transverse() {
        let r = transversality_report(&TorusLift::cat(), &TorusLift::shear(0.3), 64, 20, 1).unwrap();
        let Classification::Branch2TransversePoint { x } = r.classification else { panic!("{:?}", r.classification) };
        let s = r.samples.iter().find(|s| s.x == x).unwrap();
        assert!(s.angles.iter().all(|a| *a > ANGLE_THRESHOLD));
    }
}
