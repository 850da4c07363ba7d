//! Rotation sets of maps homotopic to the identity.

use abc_torus::torus_maps::{rotation_set, TorusLift, TrigTerm};
use abc_torus::exact_linalg::IntMatrix2;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let fiber = TorusLift::trig(IntMatrix2::IDENTITY, [0.2, 0.0], vec![TrigTerm::sin([0.1, 0.0], [0, 1])])?;
    let maps = [("translation (0.3, 0.7)", TorusLift::translation([0.3, 0.7])), ("fiberwise x + 0.2 + 0.1 sin 2πy", fiber)];
    for (name, f) in &maps {
        let est = rotation_set(f, 4000, 400, 1, None)?;
        println!("{name}: {:?}", est.shape);
        for v in &est.hull_vertices {
            println!("  vertex ({:.6}, {:.6})", v[0], v[1]);
        }
        let last = est.diameter_trend.last().map_or(f64::NAN, |t| t.1);
        println!("  diameter at n = {}: {last:.3e}", est.iterate_length);
    }
    Ok(())
}
