//! Classification and rigidity diagnostics for abelian-by-cyclic group
//! actions `Z ⋉_B Z^2` on the 2-torus.
//!
//! The crate is organised bottom-up:
//!
//! * [`exact_linalg`]: rationals, real quadratic fields, SL₂(Z) eigendata,
//!   Kronecker products and the Sylvester equation `AX - XB = C`.
//! * [`affine_actions`]: classification of affine actions and exact
//!   faithfulness decisions.
//! * [`torus_maps`]: lifts of torus maps, rotation sets and joint rotation
//!   samples.
//! * [`conjugacy`]: numerical Franks conjugacies and their regularity.
//! * [`hyperbolic`]: splittings, periodic points, transversality and a
//!   bounded ping-pong certifier.
//! * [`leaf_flow`]: circle rotation numbers, KAM conjugacies and leafwise
//!   flows.
//! * [`ergodic`]: Lyapunov exponents, entropy checks, averaged measures and
//!   derivative/distortion scans.
//! * [`cli`]: the `abc` command-line driver.

pub mod affine_actions;
pub mod cli;
pub mod conjugacy;
pub mod ergodic;
pub mod exact_linalg;
pub mod hyperbolic;
pub mod leaf_flow;
pub mod numeric;
pub mod torus_maps;
