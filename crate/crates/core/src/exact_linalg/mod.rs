//! Exact integer, rational and real-quadratic linear algebra.
//!
//! Everything here is pure and allocation-only: no floating point enters a
//! result except through explicit `to_f64` renderings.

mod contfrac;
mod eigen;
mod matrix;
mod quad;
mod rational;
mod sylvester;

pub use contfrac::{continued_fraction_quadratic, convergents, ContinuedFraction};
pub use eigen::{eigen_data, squarefree_decompose, EigenData};
pub use matrix::{kronecker, IntMatrix2, QuadMatrix, QuadVec2};
pub use quad::QuadNum;
pub use rational::Rational;
pub use sylvester::{sylvester_operator, sylvester_solve, SolutionSpace};

pub(crate) use rational::sign_of_surd;

/// Errors raised by the exact layer.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("matrix is not Anosov: |trace| = {trace_abs} <= 2")]
    NotAnosov { trace_abs: i64 },
    #[error("matrix is not unimodular: det = {det}")]
    NotUnimodular { det: i64 },
    #[error("quadratic fields differ: sqrt({0}) vs sqrt({1})")]
    FieldMismatch(u64, u64),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("parabolic trace (|tr| = 2) is outside the classification")]
    ParabolicTrace,
    #[error("linear system is inconsistent; certificate row {row:?}")]
    Inconsistent { row: Vec<Rational> },
    #[error("input is rational; no periodic expansion")]
    RationalInput,
    #[error("no period found within {0} terms")]
    PeriodNotFound(usize),
    #[error("discriminant {0} could not be reduced to a squarefree part")]
    Discriminant(i128),
    #[error("division by zero")]
    DivisionByZero,
    #[error("integer overflow")]
    Overflow,
    #[error("parse error: {0}")]
    Parse(String),
}
