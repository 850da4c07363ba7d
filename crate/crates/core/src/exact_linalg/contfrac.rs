//! Periodic continued fractions of quadratic irrationals.
//!
//! The state `(P, Q)` represents `(P + sqrt N) / Q` with `Q | N - P^2`; the
//! expansion is periodic exactly when a state repeats.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{LinalgError, QuadNum};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuedFraction {
    /// Quotients through the end of the first full period.
    pub partial_quotients: Vec<i64>,
    /// `(preperiod length, period length)`.
    pub period: (usize, usize),
}

impl ContinuedFraction {
    /// Largest partial quotient inside the period.
    pub fn max_periodic_quotient(&self) -> i64 {
        let (pre, len) = self.period;
        self.partial_quotients[pre..pre + len].iter().copied().max().unwrap_or(0)
    }

    /// Constant `gamma` with `|q x - p| > gamma / q` for all convergents.
    pub fn diophantine_constant(&self) -> f64 {
        1.0 / (self.max_periodic_quotient() as f64 + 2.0)
    }

    /// The first `n` quotients, unrolling the period as needed.
    pub fn expand(&self, n: usize) -> Vec<i64> {
        let (pre, len) = self.period;
        (0..n)
            .map(|i| if i < pre { self.partial_quotients[i] } else { self.partial_quotients[pre + (i - pre) % len] })
            .collect()
    }
}

/// Exact `floor((P + sqrt N) / Q)` for non-square `N`.
fn surd_floor(p: &BigInt, n_root: &BigInt, q: &BigInt) -> BigInt {
    if q.is_positive() {
        (p + n_root).div_floor(q)
    } else {
        (p + n_root + BigInt::from(1)).div_floor(q)
    }
}

/// Continued-fraction expansion of an irrational element of `Q(sqrt d)`.
pub fn continued_fraction_quadratic(x: &QuadNum, max_terms: usize) -> Result<ContinuedFraction, LinalgError> {
    if x.is_rational() {
        return Err(LinalgError::RationalInput);
    }
    // x = (a1/a2) + (b1/b2) sqrt d = (a1 b2 + sqrt(d a2^2 b1^2) sign) / (a2 b2)
    let (a1, a2) = (x.a().numer().clone(), x.a().denom().clone());
    let (b1, b2) = (x.b().numer().clone(), x.b().denom().clone());
    let d = BigInt::from(x.d());
    let mut p = &a1 * &b2;
    let mut q = &a2 * &b2;
    let mut n = &d * &a2 * &a2 * &b1 * &b1;
    if b1.is_negative() {
        p = -p;
        q = -q;
    }
    // Enforce Q | N - P^2 by scaling.
    if !((&n - &p * &p) % &q).is_zero() {
        let qa = q.abs();
        n = n * &qa * &qa;
        p *= &qa;
        q *= &qa;
    }
    let root = n.sqrt();
    let mut seen: HashMap<(BigInt, BigInt), usize> = HashMap::new();
    let mut quotients = Vec::new();
    for i in 0..max_terms {
        if let Some(&j) = seen.get(&(p.clone(), q.clone())) {
            return Ok(ContinuedFraction { partial_quotients: quotients, period: (j, i - j) });
        }
        seen.insert((p.clone(), q.clone()), i);
        let a = surd_floor(&p, &root, &q);
        quotients.push(a.to_i64().ok_or(LinalgError::Overflow)?);
        let p_next = &a * &q - &p;
        let q_next = (&n - &p_next * &p_next) / &q;
        p = p_next;
        q = q_next;
    }
    Err(LinalgError::PeriodNotFound(max_terms))
}

/// Convergents `p_k / q_k` of a quotient sequence.
pub fn convergents(quotients: &[i64]) -> Vec<(BigInt, BigInt)> {
    let (mut p0, mut q0) = (BigInt::from(1), BigInt::from(0));
    let (mut p1, mut q1) = (BigInt::from(0), BigInt::from(1));
    let mut out = Vec::with_capacity(quotients.len());
    for &a in quotients {
        let a = BigInt::from(a);
        let p = &a * &p0 + &p1;
        let q = &a * &q0 + &q1;
        out.push((p.clone(), q.clone()));
        p1 = p0;
        q1 = q0;
        p0 = p;
        q0 = q;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_linalg::Rational;

    #[test]
    fn golden_ratio_all_ones() {
        let phi = QuadNum::new(Rational::new(1, 2), Rational::new(1, 2), 5).unwrap();
        let cf = continued_fraction_quadratic(&phi, 50).unwrap();
        assert_eq!(cf.period, (0, 1));
        assert_eq!(cf.expand(6), vec![1; 6]);
    }

    #[test]
    fn sqrt3_has_preperiod_one_period_two() {
        let s3 = QuadNum::sqrt(3).unwrap();
        let cf = continued_fraction_quadratic(&s3, 50).unwrap();
        assert_eq!(cf.period, (1, 2));
        assert_eq!(cf.expand(5), vec![1, 1, 2, 1, 2]);
        assert!((cf.diophantine_constant() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn rational_input_rejected() {
        let r = QuadNum::rational(Rational::new(7, 3));
        assert_eq!(continued_fraction_quadratic(&r, 10), Err(LinalgError::RationalInput));
    }

    #[test]
    fn negative_and_scaled_inputs() {
        // -sqrt(2)/3 + 1/5: compare the quotients to a float expansion.
        let x = QuadNum::new(Rational::new(1, 5), Rational::new(-1, 3), 2).unwrap();
        let cf = continued_fraction_quadratic(&x, 500).unwrap();
        let mut v = x.to_f64();
        for &a in cf.expand(8).iter() {
            assert_eq!(a, v.floor() as i64);
            v = 1.0 / (v - v.floor());
        }
    }

    #[test]
    fn period_not_found_when_budget_small() {
        let x = QuadNum::new(Rational::new(1, 7), Rational::new(3, 11), 13).unwrap();
        assert!(matches!(continued_fraction_quadratic(&x, 1), Err(LinalgError::PeriodNotFound(1))));
    }
}
