//! Affine actions of `Z ⋉_B Z^2` on the torus: `B ↦ A`, `e_i ↦ x + ρ e_i`.
//!
//! Such a pair defines an action exactly when `Aρ - ρB = C` is an integer
//! matrix. [`classify`] describes all solutions ρ, [`faithfulness_test`]
//! decides density of `{ρp mod Z^2}` exactly, and [`act`] evaluates group
//! elements as affine torus maps.

mod act;
mod classify;
mod faithful;

pub use act::{act, AffineTorusMap, GroupElement};
pub use classify::{classify, ClassificationCase, ClassificationResult};
pub use faithful::{faithfulness_test, rho_annihilated, rho_faithfulness, verify_obstruction, FaithfulnessReport};

use serde::{Deserialize, Serialize};

use crate::exact_linalg::{eigen_data, kronecker, IntMatrix2, LinalgError, QuadMatrix, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ActionError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("{which} is not Anosov")]
    NotAnosov { which: &'static str },
    #[error("coefficients must be exact rationals; got a float for {0}")]
    IrrationalCoefficients(&'static str),
    #[error("A ρ - ρ B is not the integer matrix C")]
    RelationViolated,
    #[error("invalid action: {0}")]
    Invalid(String),
}

/// Which basis of the homogeneous solutions `c1`, `c2` refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelBasis {
    /// `{id, A}` when `A = B`, eigen basis otherwise.
    #[default]
    Canonical,
    /// Always `{u_A ⊗ u_{Bᵗ}, u_{A⁻¹} ⊗ u_{B⁻ᵗ}}`.
    Eigen,
}

/// An affine action with `ρ = ρ_particular + c1 N1 + c2 N2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbcAffineAction {
    #[serde(rename = "A")]
    pub a: IntMatrix2,
    #[serde(rename = "B")]
    pub b: IntMatrix2,
    #[serde(rename = "C")]
    pub c: IntMatrix2,
    pub rho_particular: QuadMatrix,
    pub c1: Rational,
    pub c2: Rational,
    #[serde(default)]
    pub basis: KernelBasis,
}

impl AbcAffineAction {
    /// Builds the action from the canonical particular solution of `Aρ - ρB = C`.
    pub fn new(a: IntMatrix2, b: IntMatrix2, c: IntMatrix2, c1: Rational, c2: Rational) -> Result<Self, ActionError> {
        Self::with_basis(a, b, c, c1, c2, KernelBasis::Canonical)
    }

    pub fn with_basis(
        a: IntMatrix2,
        b: IntMatrix2,
        c: IntMatrix2,
        c1: Rational,
        c2: Rational,
        basis: KernelBasis,
    ) -> Result<Self, ActionError> {
        let cls = classify(&a, &b, &c)?;
        let act = AbcAffineAction { a, b, c, rho_particular: cls.rho_particular, c1, c2, basis };
        act.validate()?;
        Ok(act)
    }

    /// Parses JSON, refusing float coefficients instead of guessing a rational.
    pub fn from_json(text: &str) -> Result<Self, ActionError> {
        let v: serde_json::Value = serde_json::from_str(text).map_err(|e| ActionError::Invalid(e.to_string()))?;
        for key in ["c1", "c2"] {
            if let Some(x) = v.get(key) {
                if x.is_f64() {
                    return Err(ActionError::IrrationalCoefficients(if key == "c1" { "c1" } else { "c2" }));
                }
            }
        }
        let act: AbcAffineAction = serde_json::from_value(v).map_err(|e| ActionError::Invalid(e.to_string()))?;
        act.validate()?;
        Ok(act)
    }

    /// Homogeneous solutions `N1, N2` (empty when the traces differ).
    pub fn kernel_basis(&self) -> Result<Vec<QuadMatrix>, ActionError> {
        if self.a.trace() != self.b.trace() {
            return Ok(Vec::new());
        }
        if self.a == self.b && self.basis == KernelBasis::Canonical {
            return Ok(vec![QuadMatrix::identity(2), self.a.to_quad()]);
        }
        let ea = eigen_data(&self.a)?;
        let eb = eigen_data(&self.b.transpose())?;
        Ok(vec![
            kronecker(&QuadMatrix::column(&ea.u), &QuadMatrix::row(&eb.u))?,
            kronecker(&QuadMatrix::column(&ea.u_inv), &QuadMatrix::row(&eb.u_inv))?,
        ])
    }

    /// The rotation matrix ρ; column `i` is the translation of `e_i`.
    pub fn rho(&self) -> Result<QuadMatrix, ActionError> {
        let mut rho = self.rho_particular.clone();
        let basis = self.kernel_basis()?;
        if basis.is_empty() {
            if !self.c1.is_zero() || !self.c2.is_zero() {
                return Err(ActionError::Invalid("traces differ: c1 and c2 must be 0".into()));
            }
            return Ok(rho);
        }
        for (coef, n) in [&self.c1, &self.c2].into_iter().zip(&basis) {
            rho = rho.checked_add(&n.scale(&coef.clone().into())?)?;
        }
        Ok(rho)
    }

    /// Checks Anosov-ness and `Aρ - ρB = C` exactly.
    pub fn validate(&self) -> Result<(), ActionError> {
        if !self.a.is_anosov() {
            return Err(ActionError::NotAnosov { which: "A" });
        }
        if !self.b.is_anosov() {
            return Err(ActionError::NotAnosov { which: "B" });
        }
        let rho = self.rho()?;
        let lhs = self.a.to_quad().checked_mul(&rho)?.checked_sub(&rho.checked_mul(&self.b.to_quad())?)?;
        if lhs != self.c.to_quad() {
            return Err(ActionError::RelationViolated);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cat() -> IntMatrix2 {
        IntMatrix2::new(2, 1, 1, 1)
    }

    #[test]
    fn relation_holds_for_many_coefficients() {
        let a = IntMatrix2::new(2, 1, 3, 2);
        let b = IntMatrix2::new(1, 2, 1, 3);
        // C = A X0 - X0 B for X0 = e11, so C lies in the image.
        let c = IntMatrix2::new(1, -2, 3, 0);
        for (p, q) in [(0, 1), (1, 3), (-5, 7), (2, 1)] {
            let act = AbcAffineAction::new(a, b, c, Rational::new(p, q), Rational::new(q, 11)).unwrap();
            act.validate().unwrap();
        }
    }

    #[test]
    fn json_refuses_float_coefficients() {
        let text = r#"{"A":[[2,1],[1,1]],"B":[[2,1],[1,1]],"C":[[0,0],[0,0]],
            "rho_particular":[["0","0"],["0","0"]],"c1":0.5,"c2":"0"}"#;
        assert_eq!(AbcAffineAction::from_json(text), Err(ActionError::IrrationalCoefficients("c1")));
        let ok = text.replace("0.5", "\"1/2\"");
        let act = AbcAffineAction::from_json(&ok).unwrap();
        assert_eq!(act.rho().unwrap(), QuadMatrix::from_rationals(2, 2, vec![
            Rational::new(1, 2), Rational::zero(), Rational::zero(), Rational::new(1, 2)
        ]));
    }

    #[test]
    fn tampered_relation_is_caught() {
        let mut act = AbcAffineAction::new(cat(), cat(), IntMatrix2::new(0, 0, 0, 0), Rational::one(), Rational::zero()).unwrap();
        act.c = IntMatrix2::new(1, 0, 0, 0);
        assert_eq!(act.validate(), Err(ActionError::RelationViolated));
    }

    #[test]
    fn eigen_basis_on_equal_matrices() {
        let act = AbcAffineAction::with_basis(
            cat(),
            cat(),
            IntMatrix2::new(0, 0, 0, 0),
            Rational::one(),
            Rational::zero(),
            KernelBasis::Eigen,
        )
        .unwrap();
        assert!(!act.rho().unwrap().is_rational());
    }
}
