//! Exact quadratic-field arithmetic: eigendata of a hyperbolic matrix and
//! the periodic continued fraction of its expanding slope.

use abc_torus::exact_linalg::{continued_fraction_quadratic, convergents, eigen_data, kronecker, IntMatrix2, QuadMatrix};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let a = IntMatrix2::new(2, 1, 1, 1);
    let e = eigen_data(&a)?;
    println!("field Q(√{}), λ = {:?} ≈ {:.12}", e.d, e.lambda, e.lambda_f64());
    let slope = e.u[1].checked_div(&e.u[0])?;
    let cf = continued_fraction_quadratic(&slope, 40)?;
    println!("slope quotients {:?}, period {:?}", cf.expand(8), cf.period);
    for (p, q) in convergents(&cf.expand(8)) {
        println!("  {p}/{q}");
    }
    let k = kronecker(&QuadMatrix::from_ints(2, 2, &[2, 1, 1, 1]), &QuadMatrix::identity(2))?;
    println!("A ⊗ I has {}x{} entries, integral {}", k.rows(), k.cols(), k.is_integral());
    Ok(())
}
