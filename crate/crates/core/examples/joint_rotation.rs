//! Joint rotation matrices of a commuting translation pair built from an
//! affine action, checked against the law `A ρ B⁻¹ ≡ ρ` and its
//! difference-hull consequence.

use abc_torus::affine_actions::AbcAffineAction;
use abc_torus::exact_linalg::{IntMatrix2, Rational};
use abc_torus::torus_maps::{affine_transformation_check, difference_hull_check, joint_rotation_sample, translation_pair};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cat = IntMatrix2::new(2, 1, 1, 1);
    let act = AbcAffineAction::new(cat, cat, IntMatrix2::new(0, 0, 0, 0), Rational::new(1, 3), Rational::new(2, 5))?;
    let w = affine_transformation_check(&act)?;
    println!("integral correction W = {w:?}");
    let (f1, f2) = translation_pair(&act.rho()?);
    let sample = joint_rotation_sample(&f1, &f2, &[4, 8, 16], 8, 3)?;
    println!("{} joint samples over boxes {:?}", sample.pairs.len(), sample.box_sizes);
    let hull = difference_hull_check(&sample, &act.a, &act.b, 5, 1e-9)?;
    println!("difference hull holds up to n = {}: {} (max excess {:.2e})", hull.n_max, hull.holds, hull.max_excess);
    Ok(())
}
