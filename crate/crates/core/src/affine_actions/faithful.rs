use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{AbcAffineAction, ActionError};
use crate::exact_linalg::{LinalgError, QuadMatrix, Rational};

/// Largest sup-norm searched for a shortest obstruction.
pub const OBSTRUCTION_BOUND: i64 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaithfulnessReport {
    pub faithful: bool,
    /// Nonzero `n` with `n·ρ₁, n·ρ₂ ∈ Z`.
    pub obstruction: Option<[i64; 2]>,
    pub a_infinite_order: bool,
    /// Dimension of the closure of `{ρp mod Z^2}`: 0, 1 or 2.
    pub closure_dimension: u8,
    /// Size of `{ρp mod Z^2}` when it is finite.
    pub orbit_size: Option<u64>,
}

/// Decides density of `{ρp mod Z^2}` by the character criterion.
///
/// Writing `ρ = R + √d S`, an integer `n` annihilates the orbit iff
/// `Sᵗn = 0` and `Rᵗn ∈ Z^2`. The rank of `S` splits the search into a
/// trivial case, a one-dimensional lattice and a congruence enumeration.
pub fn faithfulness_test(action: &AbcAffineAction) -> Result<FaithfulnessReport, ActionError> {
    let rho = action.rho()?;
    let rep = rho_faithfulness(&rho, !action.a.is_finite_order())?;
    debug_assert!(rep.obstruction.is_none_or(|n| verify_obstruction(action, n).unwrap_or(false)));
    Ok(rep)
}

/// The same decision for an explicit rotation matrix.
pub fn rho_faithfulness(rho: &QuadMatrix, a_infinite_order: bool) -> Result<FaithfulnessReport, ActionError> {
    rho.field()?;
    let r: [[Rational; 2]; 2] = std::array::from_fn(|i| std::array::from_fn(|j| rho.get(i, j).a().clone()));
    let s: [[Rational; 2]; 2] = std::array::from_fn(|i| std::array::from_fn(|j| rho.get(i, j).b().clone()));
    // Rows of Sᵗ are the columns of S.
    let st = transpose(&s);
    let rt = transpose(&r);

    let (obstruction, closure_dimension, orbit_size) = match rank(&st) {
        2 => (None, 2, None),
        1 => {
            let n0 = primitive_kernel(&st)?;
            let img = apply(&rt, n0);
            let m = Rational::lcm_denoms(img.iter());
            let m = m.to_i64().ok_or(LinalgError::Overflow)?;
            let n = [n0[0].checked_mul(m).ok_or(LinalgError::Overflow)?, n0[1].checked_mul(m).ok_or(LinalgError::Overflow)?];
            (Some(n), 1, None)
        }
        _ => {
            let n = shortest_rational_annihilator(&rt)?;
            (Some(n), 0, Some(rational_orbit_size(&r)?))
        }
    };
    Ok(FaithfulnessReport {
        faithful: a_infinite_order && obstruction.is_none(),
        obstruction,
        a_infinite_order,
        closure_dimension,
        orbit_size,
    })
}

/// Exact check that `n·ρ₁` and `n·ρ₂` are integers.
pub fn verify_obstruction(action: &AbcAffineAction, n: [i64; 2]) -> Result<bool, ActionError> {
    rho_annihilated(&action.rho()?, n)
}

pub fn rho_annihilated(rho: &QuadMatrix, n: [i64; 2]) -> Result<bool, ActionError> {
    if n == [0, 0] {
        return Ok(false);
    }
    for j in 0..2 {
        let x = rho.get(0, j).scale(&Rational::from_int(n[0])).checked_add(&rho.get(1, j).scale(&Rational::from_int(n[1])))?;
        if !x.is_integer() {
            return Ok(false);
        }
    }
    Ok(true)
}

fn transpose(m: &[[Rational; 2]; 2]) -> [[Rational; 2]; 2] {
    std::array::from_fn(|i| std::array::from_fn(|j| m[j][i].clone()))
}

fn apply(m: &[[Rational; 2]; 2], n: [i64; 2]) -> [Rational; 2] {
    std::array::from_fn(|i| &m[i][0] * &Rational::from_int(n[0]) + &m[i][1] * &Rational::from_int(n[1]))
}

fn rank(m: &[[Rational; 2]; 2]) -> usize {
    let det = &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0];
    if !det.is_zero() {
        2
    } else if m.iter().flatten().any(|x| !x.is_zero()) {
        1
    } else {
        0
    }
}

/// Primitive integer generator of the kernel of a rank-one matrix,
/// signed so its first nonzero entry is positive.
fn primitive_kernel(m: &[[Rational; 2]; 2]) -> Result<[i64; 2], LinalgError> {
    let row = if m[0].iter().any(|x| !x.is_zero()) { &m[0] } else { &m[1] };
    let k = [-row[1].clone(), row[0].clone()];
    let l = Rational::lcm_denoms(k.iter());
    let mut v: [BigInt; 2] = std::array::from_fn(|i| (&k[i] * &Rational::from_int(l.clone())).numer().clone());
    let g = v[0].gcd(&v[1]);
    for x in &mut v {
        *x /= &g;
    }
    let flip = if v[0].is_zero() { v[1].is_negative() } else { v[0].is_negative() };
    if flip {
        for x in &mut v {
            *x = -x.clone();
        }
    }
    Ok([v[0].to_i64().ok_or(LinalgError::Overflow)?, v[1].to_i64().ok_or(LinalgError::Overflow)?])
}

/// Shortest nonzero `n` (Euclidean) with `Rᵗ n ∈ Z^2` for rational `R`.
///
/// Ties prefer the larger first coordinate, then the larger second. The
/// lattice contains `q Z^2`, so a solution exists within sup-norm `q`.
fn shortest_rational_annihilator(rt: &[[Rational; 2]; 2]) -> Result<[i64; 2], LinalgError> {
    let q = Rational::lcm_denoms(rt.iter().flatten());
    let qi = q.to_i128().ok_or(LinalgError::Overflow)?;
    let m: [[i128; 2]; 2] = std::array::from_fn(|i| {
        std::array::from_fn(|j| (&rt[i][j] * &Rational::from_int(q.clone())).numer().to_i128().unwrap_or(0))
    });
    let hits = |n: [i64; 2]| {
        (0..2).all(|i| (m[i][0] * n[0] as i128 + m[i][1] * n[1] as i128).rem_euclid(qi) == 0)
    };
    let better = |a: [i64; 2], b: [i64; 2]| {
        let na = a[0] as i128 * a[0] as i128 + a[1] as i128 * a[1] as i128;
        let nb = b[0] as i128 * b[0] as i128 + b[1] as i128 * b[1] as i128;
        na < nb || (na == nb && (a[0], a[1]) > (b[0], b[1]))
    };
    let limit = (qi.min(OBSTRUCTION_BOUND as i128)) as i64;
    let mut best: Option<[i64; 2]> = None;
    for r in 1..=limit {
        if let Some(b) = best {
            // Any vector on ring r has Euclidean norm at least r.
            if (r as i128) * (r as i128) > b[0] as i128 * b[0] as i128 + b[1] as i128 * b[1] as i128 {
                break;
            }
        }
        for t in -r..=r {
            for n in [[r, t], [-r, t], [t, r], [t, -r]] {
                if hits(n) && best.is_none_or(|b| better(n, b)) {
                    best = Some(n);
                }
            }
        }
    }
    // Beyond the search bound fall back to the always-valid (q, 0).
    Ok(best.unwrap_or([qi.to_i64().ok_or(LinalgError::Overflow)?, 0]))
}

/// `|{R p mod Z^2}|`: `q^2` over the covolume of `R·qZ^2 + qZ^2` scaled by `q`.
fn rational_orbit_size(r: &[[Rational; 2]; 2]) -> Result<u64, LinalgError> {
    let q = Rational::lcm_denoms(r.iter().flatten());
    let m: [[BigInt; 2]; 2] =
        std::array::from_fn(|i| std::array::from_fn(|j| (&r[i][j] * &Rational::from_int(q.clone())).numer().clone()));
    // Generators of the subgroup of (Z/q)^2: columns of m together with q e1, q e2.
    let cols = [
        [m[0][0].clone(), m[1][0].clone()],
        [m[0][1].clone(), m[1][1].clone()],
        [q.clone(), BigInt::zero()],
        [BigInt::zero(), q.clone()],
    ];
    let mut g = BigInt::zero();
    for i in 0..4 {
        for j in i + 1..4 {
            let minor = &cols[i][0] * &cols[j][1] - &cols[i][1] * &cols[j][0];
            g = g.gcd(&minor);
        }
    }
    let size = (&q * &q) / g;
    size.to_u64().ok_or(LinalgError::Overflow)
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use super::*;
    use crate::affine_actions::KernelBasis;
    use crate::exact_linalg::{IntMatrix2, QuadNum};

    fn cat() -> IntMatrix2 {
        IntMatrix2::new(2, 1, 1, 1)
    }

    fn zero() -> IntMatrix2 {
        IntMatrix2::new(0, 0, 0, 0)
    }

    /// Brute-force orbit `{ρp mod Z^2}` over one period box.
    fn brute_orbit(r: &[[Rational; 2]; 2]) -> usize {
        let q = Rational::lcm_denoms(r.iter().flatten()).to_i64().unwrap();
        let mut seen = HashSet::new();
        for p0 in 0..q {
            for p1 in 0..q {
                let x: [Rational; 2] = std::array::from_fn(|i| {
                    (&r[i][0] * &Rational::from_int(p0) + &r[i][1] * &Rational::from_int(p1)).fract()
                });
                seen.insert(format!("{x:?}"));
            }
        }
        seen.len()
    }

    #[test]
    fn half_identity_gives_two_zero() {
        let act = AbcAffineAction::new(cat(), cat(), zero(), Rational::new(1, 2), Rational::zero()).unwrap();
        let rep = faithfulness_test(&act).unwrap();
        assert!(!rep.faithful);
        assert_eq!(rep.obstruction, Some([2, 0]));
        assert_eq!(rep.orbit_size, Some(4));
    }

    #[test]
    fn identity_gives_one_zero() {
        let act = AbcAffineAction::new(cat(), cat(), zero(), Rational::one(), Rational::zero()).unwrap();
        let rep = faithfulness_test(&act).unwrap();
        assert_eq!(rep.obstruction, Some([1, 0]));
        assert_eq!(rep.orbit_size, Some(1));
    }

    #[test]
    fn eigen_rotation_is_faithful() {
        let act =
            AbcAffineAction::with_basis(cat(), cat(), zero(), Rational::one(), Rational::zero(), KernelBasis::Eigen)
                .unwrap();
        let rep = faithfulness_test(&act).unwrap();
        assert!(rep.faithful);
        assert_eq!(rep.closure_dimension, 2);
    }

    #[test]
    fn eigen_sum_on_cat_is_rational() {
        // u and u_inv are Galois conjugate for symmetric cat, so N1 + N2 is rational.
        let act =
            AbcAffineAction::with_basis(cat(), cat(), zero(), Rational::one(), Rational::one(), KernelBasis::Eigen)
                .unwrap();
        let rep = faithfulness_test(&act).unwrap();
        assert_eq!(rep.closure_dimension, 0);
        assert!(verify_obstruction(&act, rep.obstruction.unwrap()).unwrap());
    }

    #[test]
    fn rank_one_obstruction() {
        let s2 = QuadNum::sqrt(2).unwrap();
        let rho = QuadMatrix::new(2, 2, vec![s2.clone(), QuadNum::rational(Rational::new(1, 3)), s2, QuadNum::zero()])
            .unwrap();
        let rep = rho_faithfulness(&rho, true).unwrap();
        assert_eq!(rep.closure_dimension, 1);
        assert_eq!(rep.obstruction, Some([3, -3]));
        assert!(rho_annihilated(&rho, [3, -3]).unwrap());
        assert!(!rho_annihilated(&rho, [1, -1]).unwrap());
    }

    #[test]
    fn orbit_size_matches_brute_force() {
        for (a, b, c, d) in [(1, 3, 2, 5), (1, 4, 0, 6), (2, 7, 1, 7), (0, 1, 5, 6)] {
            let r = [[Rational::new(a, 6), Rational::new(b, 7)], [Rational::new(c, 4), Rational::new(d, 9)]];
            assert_eq!(rational_orbit_size(&r).unwrap() as usize, brute_orbit(&r));
        }
    }
}
