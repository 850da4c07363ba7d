//! Lyapunov exponent with the entropy inequality, then SRB averages and
//! regularity scans for a Z² action commuting with the cat map.

use abc_torus::ergodic::{
    derivative_bound_scan, distortion_scan, entropy_inequality_check, lyapunov_exponent, srb_average, MeasureCloud, Z2Action,
};
use abc_torus::torus_maps::TorusLift;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = TorusLift::cat_shear(0.05);
    let est = lyapunov_exponent(&f, 16, 10_000, 7)?;
    let ent = entropy_inequality_check(&f.linear_part(), &est)?;
    println!("λ₁ = {:.6} (spread {:.1e}); log|λ_A| = {:.6}; inequality holds: {}", est.lambda1, est.spread, ent.lhs, ent.holds);

    let cat = f.linear_part();
    let action = Z2Action::Affine { rho: [[2f64.sqrt(), 0.0], [0.0, 2f64.sqrt()]] };
    for n in [8, 16, 32] {
        let cloud = srb_average(&action, &cat, n, &MeasureCloud::dirac([0.1, 0.2]))?;
        println!("N = {n}: L1 deviation from uniform on 4x4 bins {:.3}", cloud.deviation_from_uniform(4));
    }
    let cat_map = TorusLift::cat();
    let scan = derivative_bound_scan(&cat_map, &action, &cat, [1, 0], 12, 16)?;
    println!("derivative bound K = {}, growing {}", scan.k, scan.growing);
    for alpha in [0.5, 1.0] {
        let d = distortion_scan(&cat_map, &action, &cat, [1, 0], alpha, &[6, 12], 16, 1)?;
        println!("distortion constant at α = {alpha}: {:.3e}", d.c);
    }
    Ok(())
}
