//! Dynamics along one-dimensional leaves.
//!
//! Circle lifts carry rotation numbers with a rigorous `1/n` enclosure and
//! are linearised by a KAM Newton scheme. Commuting leaf maps are turned
//! into a flow `g_t` through a fundamental-domain coordinate composed with
//! the circle conjugacy.

mod circle;
mod kam;
mod leaf;

pub use circle::{CircleFamily, CircleLift, MONOTONE_GRID};
pub use kam::{circle_conjugacy, rotation_number, CircleConjugacy, RotationNumber};
pub use leaf::{
    flow_embedding, leaf_translation_structure, vector_field_eigencheck, EigenCheck, FlowOptions, FlowSummary, LeafFlow,
    LeafMap, LeafTranslation,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FlowError {
    #[error("lift is not monotone: derivative {derivative} at {at}")]
    NotMonotone { at: f64, derivative: f64 },
    #[error("small divisor |e^(2πikρ) − 1| = {divisor:e} at mode {k}")]
    SmallDivisorOverflow { k: usize, divisor: f64 },
    #[error("rotation number {measured} (±{bound}) does not match target {target}")]
    RotationMismatch { measured: f64, target: f64, bound: f64 },
    #[error("generator has a fixed point at {at}")]
    FixedPointPresent { at: f64 },
    #[error("flow misses the generators by {error:e} at {at}")]
    EmbeddingMismatch { at: f64, error: f64 },
    #[error("{0}")]
    Invalid(String),
}
