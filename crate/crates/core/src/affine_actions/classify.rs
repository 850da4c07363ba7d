use serde::{Deserialize, Serialize};

use super::ActionError;
use crate::exact_linalg::{sylvester_solve, IntMatrix2, QuadMatrix, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClassificationCase {
    /// `tr A ≠ tr B`: ρ is unique and rational.
    TraceDiffer,
    /// `tr A = tr B`, `A ≠ B`: two-dimensional eigen kernel.
    TraceEqualGeneric,
    /// `A = B`: kernel spanned by `id` and `A`.
    TraceEqualSame,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationResult {
    pub case: ClassificationCase,
    pub rho_particular: QuadMatrix,
    pub kernel_basis: Vec<QuadMatrix>,
    pub commentary: Vec<String>,
}

impl ClassificationResult {
    pub fn kernel_dimension(&self) -> usize {
        self.kernel_basis.len()
    }
}

/// All solutions of `Aρ - ρB = C` as a particular solution plus kernel span.
pub fn classify(a: &IntMatrix2, b: &IntMatrix2, c: &IntMatrix2) -> Result<ClassificationResult, ActionError> {
    if !a.is_anosov() {
        return Err(ActionError::NotAnosov { which: "A" });
    }
    if !b.is_anosov() {
        return Err(ActionError::NotAnosov { which: "B" });
    }
    let cr: [[Rational; 2]; 2] = std::array::from_fn(|i| std::array::from_fn(|j| Rational::from_int(c.0[i][j])));
    let sol = sylvester_solve(a, b, &cr)?;
    let case = if a.trace() != b.trace() {
        ClassificationCase::TraceDiffer
    } else if a == b {
        ClassificationCase::TraceEqualSame
    } else {
        ClassificationCase::TraceEqualGeneric
    };
    let mut commentary = vec![format!("particular solution: {}", sol.selection)];
    commentary.push(match case {
        ClassificationCase::TraceDiffer => "spectra of A and B are disjoint; the solution is unique".to_string(),
        ClassificationCase::TraceEqualSame => "A = B; kernel basis {id, A}".to_string(),
        ClassificationCase::TraceEqualGeneric => {
            "equal traces; kernel basis {u_A ⊗ u_(B^t), u_(A^-1) ⊗ u_(B^-t)} with first coordinates normalized to 1"
                .to_string()
        }
    });
    Ok(ClassificationResult { case, rho_particular: sol.particular, kernel_basis: sol.kernel_basis, commentary })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_cases() {
        let cat = IntMatrix2::new(2, 1, 1, 1);
        let z = IntMatrix2::new(0, 0, 0, 0);
        let b = IntMatrix2::new(1, 2, 1, 3);
        assert_eq!(classify(&cat, &cat, &z).unwrap().case, ClassificationCase::TraceEqualSame);
        let r = classify(&cat, &b, &z).unwrap();
        assert_eq!(r.case, ClassificationCase::TraceDiffer);
        assert_eq!(r.kernel_dimension(), 0);
        assert!(r.rho_particular.is_zero());
        let g = classify(&IntMatrix2::new(2, 1, 3, 2), &b, &z).unwrap();
        assert_eq!(g.case, ClassificationCase::TraceEqualGeneric);
        assert_eq!(g.kernel_dimension(), 2);
    }

    #[test]
    fn non_anosov_rejected() {
        let p = IntMatrix2::new(1, 1, 0, 1);
        let z = IntMatrix2::new(0, 0, 0, 0);
        assert_eq!(classify(&p, &p, &z), Err(ActionError::NotAnosov { which: "A" }));
    }
}
