use super::{check_finite, hermitian_evd, hermitianize, CMatrix, C64};
use crate::error::{contract, Result};

/// Condition number above which a loaded matrix counts as singular.
pub const MAX_CONDITION: f64 = 1e14;

/// `(A + load·I)⁻¹` for Hermitian positive semidefinite `A`.
///
/// The inverse is assembled from the eigendecomposition of the loaded
/// matrix, which also yields the condition number used for the singularity
/// check.
pub fn regularized_inverse(a: &CMatrix, load: f64) -> Result<CMatrix> {
    if a.nrows() != a.ncols() {
        return Err(contract("regularized_inverse needs a square matrix"));
    }
    if !(load >= 0.0) || !load.is_finite() {
        return Err(contract(format!(
            "diagonal load must be finite and >= 0, got {load}"
        )));
    }
    check_finite(a, "regularized_inverse input")?;
    let mut loaded = a.clone();
    for i in 0..loaded.nrows() {
        loaded[(i, i)] += C64::new(load, 0.0);
    }
    hermitianize_if_close(&mut loaded)?;
    let eig = hermitian_evd(&loaded)?;
    let largest = eig.eigenvalues[0];
    let smallest = *eig.eigenvalues.last().unwrap();
    if !(smallest > 0.0) || largest / smallest > MAX_CONDITION {
        let condition = if smallest > 0.0 {
            largest / smallest
        } else {
            f64::INFINITY
        };
        return Err(crate::Error::Singular { condition });
    }
    let mut scaled = eig.eigenvectors.clone();
    for (j, &lambda) in eig.eigenvalues.iter().enumerate() {
        scaled.column_mut(j).scale_mut(1.0 / lambda);
    }
    let mut inv = scaled * eig.eigenvectors.adjoint();
    hermitianize(&mut inv);
    Ok(inv)
}

fn hermitianize_if_close(a: &mut CMatrix) -> Result<()> {
    let defect = super::hermitian_defect(a);
    if defect > super::HERMITIAN_TOL {
        return Err(contract(format!(
            "regularized_inverse input is not Hermitian (relative defect {defect:.3e})"
        )));
    }
    hermitianize(a);
    Ok(())
}
