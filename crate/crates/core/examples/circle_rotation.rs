//! Rotation number of an analytic circle map and its conjugacy to the
//! rigid rotation.

use abc_torus::leaf_flow::{circle_conjugacy, rotation_number, CircleLift};
use abc_torus::torus_maps::Phase;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    let g = CircleLift::trig(golden, &[(0.05, 1, Phase::Sin)])?;
    let r = rotation_number(&g, 100_000, 0.0)?;
    println!("rotation number {:.12} ± {:.1e}", r.rho, r.error_bound);
    let k = circle_conjugacy(&g, golden, 32, 40)?;
    println!("conjugacy to rotation by {golden:.12}: defect {:.2e} after {} iterations, tau {:.3e}", k.defect, k.iterations, k.tau);
    Ok(())
}
