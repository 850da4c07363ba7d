//! The map `X -> AX - XB` on 2×2 matrices and its exact solution sets.
//!
//! With column stacking, `vec(AX - XB) = (I⊗A - Bᵀ⊗I) vec(X)`. The
//! transpose on `B` is what makes the identity hold entrywise.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{eigen_data, kronecker, IntMatrix2, LinalgError, QuadMatrix, Rational};

/// Particular solution plus a basis of the homogeneous solutions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionSpace {
    /// Canonical rational solution: free variables of the echelon form set to 0.
    pub particular: QuadMatrix,
    pub kernel_basis: Vec<QuadMatrix>,
    /// How the particular solution was selected.
    pub selection: String,
}

/// The 4×4 integer matrix `I⊗A - Bᵀ⊗I`.
pub fn sylvester_operator(a: &IntMatrix2, b: &IntMatrix2) -> [[i64; 4]; 4] {
    let mut l = [[0i64; 4]; 4];
    for blk_r in 0..2 {
        for blk_c in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    let id_a = if blk_r == blk_c { a.0[i][j] } else { 0 };
                    let bt_id = if i == j { b.0[blk_c][blk_r] } else { 0 };
                    l[blk_r * 2 + i][blk_c * 2 + j] = id_a - bt_id;
                }
            }
        }
    }
    l
}

fn vec_col(m: &[[Rational; 2]; 2]) -> [Rational; 4] {
    [m[0][0].clone(), m[1][0].clone(), m[0][1].clone(), m[1][1].clone()]
}

fn unvec(v: &[Rational]) -> QuadMatrix {
    QuadMatrix::from_rationals(2, 2, vec![v[0].clone(), v[2].clone(), v[1].clone(), v[3].clone()])
}

struct Echelon {
    rows: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
}

/// Fraction-free (Bareiss) forward elimination of an augmented integer system.
fn bareiss(mut m: Vec<Vec<BigInt>>, ncols: usize) -> Echelon {
    let nrows = m.len();
    let mut prev = BigInt::one();
    let mut r = 0;
    let mut pivots = Vec::new();
    for c in 0..ncols {
        let Some(p) = (r..nrows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..nrows {
            for j in c + 1..=ncols {
                let v = &m[r][c] * &m[i][j] - &m[i][c] * &m[r][j];
                debug_assert!((&v % &prev).is_zero(), "Bareiss division must be exact");
                m[i][j] = v / &prev;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        pivots.push(c);
        r += 1;
        if r == nrows {
            break;
        }
    }
    Echelon { rows: m, pivots }
}

/// Solves `M x = b` exactly, returning the canonical particular solution and
/// a nullspace basis, or the inconsistent echelon row.
pub(crate) fn solve_integer_system(
    mat: &[Vec<i64>],
    rhs: &[BigInt],
) -> Result<(Vec<Rational>, Vec<Vec<Rational>>), LinalgError> {
    let ncols = mat.first().map_or(0, Vec::len);
    let aug: Vec<Vec<BigInt>> = mat
        .iter()
        .zip(rhs)
        .map(|(row, b)| row.iter().map(|&x| BigInt::from(x)).chain([b.clone()]).collect())
        .collect();
    let ech = bareiss(aug, ncols);
    let rank = ech.pivots.len();
    for row in &ech.rows[rank..] {
        if !row[ncols].is_zero() {
            return Err(LinalgError::Inconsistent {
                row: row.iter().map(|x| Rational::from_int(x.clone())).collect(),
            });
        }
    }
    let back_sub = |rhs_col: &dyn Fn(usize) -> Rational, free: &[(usize, Rational)]| -> Vec<Rational> {
        let mut x = vec![Rational::zero(); ncols];
        for (c, v) in free {
            x[*c] = v.clone();
        }
        for k in (0..rank).rev() {
            let c = ech.pivots[k];
            let row = &ech.rows[k];
            let mut acc = rhs_col(k);
            for j in c + 1..ncols {
                if !row[j].is_zero() {
                    acc = acc - Rational::from_int(row[j].clone()) * x[j].clone();
                }
            }
            x[c] = acc / Rational::from_int(row[c].clone());
        }
        x
    };
    let particular = back_sub(&|k| Rational::from_int(ech.rows[k][ncols].clone()), &[]);
    let free_cols: Vec<usize> = (0..ncols).filter(|c| !ech.pivots.contains(c)).collect();
    let kernel = free_cols
        .iter()
        .map(|&f| back_sub(&|_| Rational::zero(), &[(f, Rational::one())]))
        .collect();
    Ok((particular, kernel))
}

/// Solves `AX - XB = C` over the rationals and returns the kernel of
/// `X -> AX - XB` in the basis used by the classification.
pub fn sylvester_solve(
    a: &IntMatrix2,
    b: &IntMatrix2,
    c: &[[Rational; 2]; 2],
) -> Result<SolutionSpace, LinalgError> {
    for m in [a, b] {
        if m.det() != 1 {
            return Err(LinalgError::NotUnimodular { det: m.det() });
        }
        if m.trace().abs() == 2 {
            return Err(LinalgError::ParabolicTrace);
        }
    }
    let l = sylvester_operator(a, b);
    let rows: Vec<Vec<i64>> = l.iter().map(|r| r.to_vec()).collect();
    // Clear denominators of C so the elimination stays integral.
    let cv = vec_col(c);
    let den = Rational::lcm_denoms(cv.iter());
    let rhs: Vec<BigInt> = cv.iter().map(|x| (x.clone() * Rational::from_int(den.clone())).floor()).collect();
    let (part, null) = solve_integer_system(&rows, &rhs)?;
    let scale = Rational::from_int(den).recip().expect("nonzero lcm");
    let particular = unvec(&part.iter().map(|x| x.clone() * scale.clone()).collect::<Vec<_>>());

    let kernel_basis = if a.trace() != b.trace() {
        Vec::new()
    } else if a.trace().abs() > 2 {
        if a == b {
            vec![QuadMatrix::identity(2), a.to_quad()]
        } else {
            let ea = eigen_data(a)?;
            let ebt = eigen_data(&b.transpose())?;
            vec![
                kronecker(&QuadMatrix::column(&ea.u), &QuadMatrix::row(&ebt.u))?,
                kronecker(&QuadMatrix::column(&ea.u_inv), &QuadMatrix::row(&ebt.u_inv))?,
            ]
        }
    } else {
        null.iter().map(|v| unvec(v)).collect()
    };
    Ok(SolutionSpace {
        particular,
        kernel_basis,
        selection: "fraction-free elimination on vec(X) with free variables set to 0".into(),
    })
}
