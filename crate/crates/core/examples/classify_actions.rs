//! Solves `A ρ − ρ B = C` exactly for a few hyperbolic pairs and prints
//! the classification case with the solution space.

use abc_torus::affine_actions::classify;
use abc_torus::exact_linalg::IntMatrix2;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let zero = IntMatrix2::new(0, 0, 0, 0);
    let cases = [
        ("cat with itself", IntMatrix2::new(2, 1, 1, 1), IntMatrix2::new(2, 1, 1, 1), zero),
        ("conjugate pair", IntMatrix2::new(2, 1, 3, 2), IntMatrix2::new(1, 2, 1, 3), zero),
        ("different traces", IntMatrix2::new(2, 1, 1, 1), IntMatrix2::new(1, 2, 1, 3), IntMatrix2::new(1, 0, 0, 1)),
    ];
    for (name, a, b, c) in cases {
        let r = classify(&a, &b, &c)?;
        println!("{name}: {:?}, kernel dimension {}", r.case, r.kernel_dimension());
        println!("  particular solution {}", serde_json::to_string(&r.rho_particular)?);
        for (k, n) in r.kernel_basis.iter().enumerate() {
            println!("  kernel[{k}] {}", serde_json::to_string(n)?);
        }
    }
    Ok(())
}
