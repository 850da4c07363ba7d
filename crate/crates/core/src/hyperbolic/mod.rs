//! Hyperbolic structure of Anosov torus maps.
//!
//! Stable and unstable fields come from cone iteration along orbits.
//! Periodic points are continued by Newton from the exactly enumerated
//! periodic points of the linear part. A transversality report compares a
//! second map's derivative with the splitting, and the ping-pong certifier
//! tracks small disks through bounded words to show they move a test set.

pub mod disk;
mod periodic;
mod pingpong;
mod splitting;
mod transversality;

pub use periodic::{iterate_jac, linear_periodic_seeds, periodic_points, PeriodicPoint, PeriodicSearch};
pub use pingpong::{
    inclination_check, pingpong_certificate, reduced_words, semigroup_certificate, InclinationReport, Letter,
    PingPongCertificate, PingPongOptions, WordEvidence,
};
pub use splitting::{
    compute_splitting, expansion_rate, linear_directions, stable_direction, stable_direction_pair, unstable_direction,
    unstable_direction_pair, SplittingField, EXPANSION_LENGTH, EXPANSION_ORBITS,
};
pub use transversality::{
    transversality_report, AngleSample, Classification, Foliation, TransversalityReport, ANGLE_THRESHOLD,
    COLLAPSE_THRESHOLD,
};

use crate::numeric::Vec2;
use crate::torus_maps::MapError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HypError {
    #[error("cone criterion failed: {0}")]
    ConeCriterionFailed(String),
    #[error("Newton diverged from seed {seed:?}")]
    NewtonDivergence { seed: Vec2 },
    #[error("no periodic point found")]
    EmptyResult,
    #[error("transversality lost: {0}")]
    LostTransversality(String),
    #[error("manifold tracking lost: {0}")]
    ManifoldTrackingLoss(String),
    #[error("no power in {tried:?} passes every word; last failure: {reason}")]
    NoValidN { tried: Vec<usize>, reason: String },
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Map(#[from] MapError),
}
