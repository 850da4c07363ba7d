use serde::{Deserialize, Serialize};

use super::{IntMatrix2, LinalgError, QuadNum, QuadVec2, Rational};

/// Exact eigenpairs of an Anosov matrix over `Q(sqrt d)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenData {
    /// Larger-modulus eigenvalue.
    pub lambda: QuadNum,
    pub lambda_inv: QuadNum,
    /// Eigenvector of `lambda`, first coordinate 1.
    pub u: QuadVec2,
    /// Eigenvector of `lambda_inv`, first coordinate 1.
    pub u_inv: QuadVec2,
    pub d: u64,
}

impl EigenData {
    pub fn lambda_f64(&self) -> f64 {
        self.lambda.to_f64()
    }

    /// Unit float renderings `(unstable, stable)`.
    pub fn unit_directions(&self) -> ([f64; 2], [f64; 2]) {
        let n = |v: &QuadVec2| {
            let (x, y) = (v[0].to_f64(), v[1].to_f64());
            let r = x.hypot(y);
            [x / r, y / r]
        };
        (n(&self.u), n(&self.u_inv))
    }
}

/// Writes `n = s^2 d` with `d` squarefree, trial dividing up to 10^6.
pub fn squarefree_decompose(n: i128) -> Result<(i128, u64), LinalgError> {
    if n <= 0 {
        return Err(LinalgError::Discriminant(n));
    }
    let mut rest = n;
    let mut s: i128 = 1;
    let mut d: i128 = 1;
    let mut p: i128 = 2;
    while p <= 1_000_000 && p * p <= rest {
        let mut e = 0;
        while rest % p == 0 {
            rest /= p;
            e += 1;
        }
        for _ in 0..e / 2 {
            s *= p;
        }
        if e % 2 == 1 {
            d *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        let r = isqrt_i128(rest);
        if r * r == rest {
            s *= r;
        } else if p > 1_000_000 && rest >= 1_000_000_000_000_000_000 {
            // More than two large prime factors may remain; refuse to guess.
            return Err(LinalgError::Discriminant(n));
        } else {
            d *= rest;
        }
    }
    let d = u64::try_from(d).map_err(|_| LinalgError::Discriminant(n))?;
    Ok((s, d))
}

fn isqrt_i128(n: i128) -> i128 {
    let mut r = (n as f64).sqrt() as i128;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Eigenvalues `(t ± sqrt(t^2 - 4)) / 2` and normalized eigenvectors.
pub fn eigen_data(m: &IntMatrix2) -> Result<EigenData, LinalgError> {
    let det = m.det();
    if det != 1 {
        return Err(LinalgError::NotUnimodular { det });
    }
    let t = m.trace();
    if t.abs() <= 2 {
        return Err(LinalgError::NotAnosov { trace_abs: t.abs() });
    }
    let disc = (t as i128) * (t as i128) - 4;
    let (s, d) = squarefree_decompose(disc)?;
    let half = |x: i128| Rational::new(x, 2);
    // Larger modulus: the root whose surd sign matches the trace sign.
    let sign = t.signum() as i128;
    let lambda = QuadNum::new(half(t as i128), half(sign * s), d)?;
    let lambda_inv = QuadNum::new(half(t as i128), half(-sign * s), d)?;
    let [[p, q], _] = m.0;
    // Anosov forces q != 0, so (1, (mu - p)/q) is an eigenvector.
    let qi = Rational::from_int(q).recip().ok_or(LinalgError::DivisionByZero)?;
    let second = |mu: &QuadNum| (mu - &QuadNum::int(p)).scale(&qi);
    Ok(EigenData {
        u: [QuadNum::one(), second(&lambda)],
        u_inv: [QuadNum::one(), second(&lambda_inv)],
        lambda,
        lambda_inv,
        d,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn apply(m: &IntMatrix2, v: &QuadVec2) -> QuadVec2 {
        let e = |i: usize| &(&QuadNum::int(m.0[i][0]) * &v[0]) + &(&QuadNum::int(m.0[i][1]) * &v[1]);
        [e(0), e(1)]
    }

    #[test]
    fn cat_map_eigendata() {
        let e = eigen_data(&IntMatrix2::new(2, 1, 1, 1)).unwrap();
        let r = |a, b| Rational::new(a, b);
        assert_eq!(e.lambda, QuadNum::new(r(3, 2), r(1, 2), 5).unwrap());
        assert_eq!(e.u[1], QuadNum::new(r(-1, 2), r(1, 2), 5).unwrap());
    }

    #[test]
    fn second_example_eigendata() {
        let e = eigen_data(&IntMatrix2::new(1, 2, 1, 3)).unwrap();
        let r = |a, b| Rational::new(a, b);
        assert_eq!(e.lambda, QuadNum::new(r(2, 1), r(1, 1), 3).unwrap());
        assert_eq!(e.u[1], QuadNum::new(r(1, 2), r(1, 2), 3).unwrap());
    }

    #[test]
    fn parabolic_and_non_unimodular_rejected() {
        assert_eq!(
            eigen_data(&IntMatrix2::new(1, 1, 0, 1)),
            Err(LinalgError::NotAnosov { trace_abs: 2 })
        );
        assert_eq!(
            eigen_data(&IntMatrix2::new(2, 1, 1, 2)),
            Err(LinalgError::NotUnimodular { det: 3 })
        );
    }

    #[test]
    fn eigen_equations_hold_exactly_for_negative_trace() {
        let m = IntMatrix2::new(-3, 1, -1, 0);
        let e = eigen_data(&m).unwrap();
        assert!(e.lambda.to_f64().abs() > 1.0);
        let mu = apply(&m, &e.u);
        assert_eq!(mu, [&e.lambda * &e.u[0], &e.lambda * &e.u[1]]);
        let ms = apply(&m, &e.u_inv);
        assert_eq!(ms, [&e.lambda_inv * &e.u_inv[0], &e.lambda_inv * &e.u_inv[1]]);
        assert_eq!(&e.lambda * &e.lambda_inv, QuadNum::one());
    }

    #[test]
    fn squarefree_parts() {
        assert_eq!(squarefree_decompose(12).unwrap(), (2, 3));
        assert_eq!(squarefree_decompose(5).unwrap(), (1, 5));
        assert_eq!(squarefree_decompose(32).unwrap(), (4, 2));
        // product of two primes above the trial bound stays squarefree
        let p = 1_000_003i128;
        assert_eq!(squarefree_decompose(p * p * 7).unwrap(), (p, 7));
    }
}
