use serde::{Deserialize, Serialize};

use super::{AbcAffineAction, ActionError};
use crate::exact_linalg::{IntMatrix2, LinalgError, QuadNum, Rational};

/// Element `(n, v)` of `Z ⋉_B Z^2`, standing for `v ∘ B^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupElement {
    pub n: i64,
    pub v: [i64; 2],
}

impl GroupElement {
    pub fn new(n: i64, v: [i64; 2]) -> Self {
        GroupElement { n, v }
    }

    pub fn identity() -> Self {
        GroupElement { n: 0, v: [0, 0] }
    }

    /// `(n, v)(m, w) = (n + m, v + Bⁿ w)`.
    pub fn mul(&self, other: &Self, b: &IntMatrix2) -> Result<Self, LinalgError> {
        let bn = b.checked_pow(self.n).ok_or(LinalgError::Overflow)?;
        let w = bn.apply(other.v);
        Ok(GroupElement {
            n: self.n.checked_add(other.n).ok_or(LinalgError::Overflow)?,
            v: [self.v[0] + w[0], self.v[1] + w[1]],
        })
    }

    /// `(n, v)⁻¹ = (-n, -B⁻ⁿ v)`.
    pub fn inverse(&self, b: &IntMatrix2) -> Result<Self, LinalgError> {
        let bn = b.checked_pow(-self.n).ok_or(LinalgError::Overflow)?;
        let w = bn.apply(self.v);
        Ok(GroupElement { n: -self.n, v: [-w[0], -w[1]] })
    }
}

/// `x ↦ M x + t` on the torus, with `t` exact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineTorusMap {
    pub m: IntMatrix2,
    pub t: [QuadNum; 2],
}

impl AffineTorusMap {
    pub fn identity() -> Self {
        AffineTorusMap { m: IntMatrix2::IDENTITY, t: [QuadNum::zero(), QuadNum::zero()] }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Self, LinalgError> {
        let m = self.m.checked_mul(&other.m).ok_or(LinalgError::Overflow)?;
        let mt = mat_apply(&self.m, &other.t)?;
        Ok(AffineTorusMap { m, t: [mt[0].checked_add(&self.t[0])?, mt[1].checked_add(&self.t[1])?] })
    }

    pub fn inverse(&self) -> Result<Self, LinalgError> {
        let mi = self.m.inverse()?;
        let t = mat_apply(&mi, &self.t)?;
        Ok(AffineTorusMap { m: mi, t: [-&t[0], -&t[1]] })
    }

    /// Equality as torus maps: same linear part, translations equal mod `Z^2`.
    pub fn eq_mod_lattice(&self, other: &Self) -> bool {
        self.m == other.m
            && self.t.iter().zip(&other.t).all(|(a, b)| a.checked_sub(b).map(|x| x.is_integer()).unwrap_or(false))
    }

    pub fn apply(&self, x: [f64; 2]) -> [f64; 2] {
        let m = self.m.to_f64();
        [
            m[0][0] * x[0] + m[0][1] * x[1] + self.t[0].to_f64(),
            m[1][0] * x[0] + m[1][1] * x[1] + self.t[1].to_f64(),
        ]
    }

    pub fn translation_f64(&self) -> [f64; 2] {
        [self.t[0].to_f64(), self.t[1].to_f64()]
    }
}

fn mat_apply(m: &IntMatrix2, t: &[QuadNum; 2]) -> Result<[QuadNum; 2], LinalgError> {
    let row = |i: usize| -> Result<QuadNum, LinalgError> {
        let a = t[0].scale(&Rational::from_int(m.0[i][0]));
        let b = t[1].scale(&Rational::from_int(m.0[i][1]));
        a.checked_add(&b)
    };
    Ok([row(0)?, row(1)?])
}

/// The torus map `Φ(v ∘ Bⁿ): x ↦ Aⁿ x + ρ v`.
pub fn act(action: &AbcAffineAction, g: GroupElement) -> Result<AffineTorusMap, ActionError> {
    let rho = action.rho()?;
    let an = action.a.checked_pow(g.n).ok_or(LinalgError::Overflow)?;
    let v = [QuadNum::int(g.v[0]), QuadNum::int(g.v[1])];
    let t = rho.apply(&v)?;
    Ok(AffineTorusMap { m: an, t: [t[0].clone(), t[1].clone()] })
}
