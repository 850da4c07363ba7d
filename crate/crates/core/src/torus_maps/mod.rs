//! Lifts of torus maps and their rotation data.
//!
//! [`TorusLift`] is a small expression tree over affine maps, linear maps
//! plus trigonometric perturbations, composition and inversion. Every lift
//! evaluates with its Jacobian. Rotation sets, joint rotation samples for
//! commuting pairs and translation tests are built on top.

mod joint;
mod lift;
mod rotation;

pub use joint::{
    affine_transformation_check, commutator_defect, difference_hull_check, joint_rotation_sample, translation_pair,
    DifferenceHullCheck, JointPair, JointRotationSample,
};
pub use lift::{Phase, TorusLift, TrigTerm};
pub use rotation::{
    average_rotation_vector, displacement, displacement_exact, homotopy_class, rotation_set, stratified_point, translation_defect,
    ExactDisplacement, RotationSetEstimate, RotationShape, TranslationDefect,
};

use crate::exact_linalg::IntMatrix2;
use crate::numeric::Vec2;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MapError {
    #[error("Newton inversion did not converge at {at:?}")]
    InversionDivergence { at: Vec2 },
    #[error("perturbation Lipschitz bound {lip} is not below 1/|M^-1| = {bound}")]
    NotInvertible { lip: f64, bound: f64 },
    #[error("linear part {0} is not the identity")]
    NotHomotopicToIdentity(IntMatrix2),
    #[error("F(x + e_i) - F(x) = {value} is not an integer at {at:?}")]
    NonIntegerPeriodicity { at: Vec2, value: f64 },
    #[error("maps do not commute at {at:?}: defect {defect}")]
    NonCommuting { at: Vec2, defect: f64 },
    #[error("commutator is not a constant integer translation at {at:?} (deviation {deviation})")]
    NonConstantDefect { at: Vec2, deviation: f64 },
    #[error("plane displacement overflows f64 after {n} iterates")]
    Overflow { n: usize },
    #[error("map parse error: {0}")]
    Parse(String),
    #[error("{0}")]
    Invalid(String),
}
