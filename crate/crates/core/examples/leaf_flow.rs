//! Translation structure on a leaf and the flow it embeds in.

use abc_torus::exact_linalg::IntMatrix2;
use abc_torus::leaf_flow::{flow_embedding, leaf_translation_structure, vector_field_eigencheck, FlowOptions, LeafMap};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let lambda = (3.0 + 5f64.sqrt()) / 2.0;
    let cn = 2.0 / (1.0 + 5f64.sqrt());
    let (f1, f2) = (LeafMap::translation(1.0), LeafMap::translation(cn));
    let lt = leaf_translation_structure(&f1, &f2, (-10.0, 10.0), &IntMatrix2::new(2, 1, 1, 1), 10_000)?;
    println!("translation ratio c = {:.10} ± {:.1e}, check {}", lt.c, lt.error_bound, lt.check);

    let amb = LeafMap::affine(lambda, 0.0);
    let flow = flow_embedding(&f1, &f2, lt.c, 0.0, &FlowOptions::default(), Some((&amb, lambda)))?;
    println!("flow defect {:.2e}, renormalization defect {:?}", flow.flow_defect(32, 1), flow.renormalization_defect);
    for dt in [0.04, 0.02, 0.01] {
        let e = vector_field_eigencheck(&flow, &amb, lambda, dt, 32);
        println!("eigencheck dt = {dt}: residual {:.2e}", e.max_residual);
    }
    Ok(())
}
