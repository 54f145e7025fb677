use super::{check_finite, hermitian_defect, CMatrix, HERMITIAN_TOL};
use crate::error::{contract, Result};

/// Full spectrum of a Hermitian matrix, eigenvalues sorted descending.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Column `i` pairs with `eigenvalues[i]`.
    pub eigenvectors: CMatrix,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Columns `start..` of the eigenvector matrix.
    pub fn trailing_vectors(&self, start: usize) -> CMatrix {
        let n = self.dim();
        self.eigenvectors.columns(start, n - start).into_owned()
    }

    pub fn leading_vectors(&self, count: usize) -> CMatrix {
        self.eigenvectors.columns(0, count).into_owned()
    }

    /// `U Σ Uᴴ`.
    pub fn reconstruct(&self) -> CMatrix {
        let mut scaled = self.eigenvectors.clone();
        for (j, &lambda) in self.eigenvalues.iter().enumerate() {
            scaled.column_mut(j).scale_mut(lambda);
        }
        scaled * self.eigenvectors.adjoint()
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// The caller is expected to Hermitianize first; inputs further than
/// [`HERMITIAN_TOL`] from Hermitian are rejected.
pub fn hermitian_evd(a: &CMatrix) -> Result<EigenDecomposition> {
    if a.nrows() != a.ncols() || a.nrows() == 0 {
        return Err(contract(format!(
            "hermitian_evd needs a non-empty square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    check_finite(a, "hermitian_evd input")?;
    let defect = hermitian_defect(a);
    if defect > HERMITIAN_TOL {
        return Err(contract(format!(
            "hermitian_evd input is not Hermitian (relative defect {defect:.3e})"
        )));
    }

    let n = a.nrows();
    let eig = nalgebra::SymmetricEigen::try_new(a.clone(), f64::EPSILON, 0)
        .ok_or(crate::Error::NoConvergence(n))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));

    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut eigenvectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{frobenius, C64};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn identity_has_unit_spectrum() {
        let e = hermitian_evd(&CMatrix::identity(3, 3)).unwrap();
        for v in &e.eigenvalues {
            assert!((v - 1.0).abs() < 1e-14);
        }
        let gram = e.eigenvectors.adjoint() * &e.eigenvectors;
        assert!(frobenius(&(gram - CMatrix::identity(3, 3))) < 1e-12);
    }

    #[test]
    fn diagonal_sorted_descending() {
        let a = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c(1.0, 0.0),
            c(5.0, 0.0),
            c(2.0, 0.0),
        ]));
        let e = hermitian_evd(&a).unwrap();
        assert_eq!(e.eigenvalues.len(), 3);
        for (got, want) in e.eigenvalues.iter().zip([5.0, 2.0, 1.0]) {
            assert!((got - want).abs() < 1e-14);
        }
        // standard basis up to phase: column 0 is e_1
        assert!((e.eigenvectors[(1, 0)].norm() - 1.0).abs() < 1e-12);
        assert!((e.eigenvectors[(2, 1)].norm() - 1.0).abs() < 1e-12);
        assert!((e.eigenvectors[(0, 2)].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rank_one_outer_product() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v = nalgebra::DVector::from_vec(vec![c(s, 0.0), c(0.0, s)]);
        let a = &v * v.adjoint();
        let e = hermitian_evd(&a).unwrap();
        assert!((e.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!(e.eigenvalues[1].abs() < 1e-14);
        let overlap = (e.eigenvectors.column(0).adjoint() * &v)[(0, 0)].norm();
        assert!((overlap - 1.0).abs() < 1e-12);
        assert!(frobenius(&(e.reconstruct() - &a)) <= 1e-8 * frobenius(&a));
    }

    #[test]
    fn rejects_non_square_and_non_hermitian() {
        assert!(matches!(
            hermitian_evd(&CMatrix::zeros(2, 3)),
            Err(crate::Error::Contract(_))
        ));
        let mut a = CMatrix::identity(2, 2);
        a[(0, 1)] = c(0.5, 0.0);
        assert!(matches!(hermitian_evd(&a), Err(crate::Error::Contract(_))));
    }
}
