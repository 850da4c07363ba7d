//! Invariant splitting and periodic points of a perturbed cat map.

use abc_torus::hyperbolic::{compute_splitting, periodic_points};
use abc_torus::torus_maps::TorusLift;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = TorusLift::cat_shear(0.05);
    let s = compute_splitting(&f, 24, 40)?;
    println!("splitting on 24x24 grid: defect {:.2e}, min angle {:.3}, expansion {:.4}", s.defect, s.min_angle, s.expansion_rate);
    for q in 1..=4 {
        let p = periodic_points(&f, q, None)?;
        // |tr A^q − 2| for the cat map: 1, 5, 16, 45.
        println!("period {q}: {} points, {} seeds diverged", p.points.len(), p.diverged.len());
    }
    Ok(())
}
