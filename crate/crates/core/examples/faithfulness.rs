//! Faithfulness of the translation part of an affine action.
//!
//! A rational parameter leaves a finite orbit and an integer obstruction
//! vector. A generic quadratic-irrational parameter gives a faithful action.

use abc_torus::affine_actions::{faithfulness_test, verify_obstruction, AbcAffineAction, KernelBasis};
use abc_torus::exact_linalg::{IntMatrix2, Rational};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cat = IntMatrix2::new(2, 1, 1, 1);
    let zero = IntMatrix2::new(0, 0, 0, 0);
    let actions = [
        ("rational c1 = 1/2", AbcAffineAction::new(cat, cat, zero, Rational::new(1, 2), Rational::zero())?),
        ("eigenbasis c1 = 1", AbcAffineAction::with_basis(cat, cat, zero, Rational::one(), Rational::zero(), KernelBasis::Eigen)?),
    ];
    for (name, act) in &actions {
        let rep = faithfulness_test(act)?;
        println!("{name}: faithful {}, closure dimension {}, orbit size {:?}", rep.faithful, rep.closure_dimension, rep.orbit_size);
        if let Some(n) = rep.obstruction {
            println!("  obstruction {n:?} annihilates rho: {}", verify_obstruction(act, n)?);
        }
    }
    Ok(())
}
