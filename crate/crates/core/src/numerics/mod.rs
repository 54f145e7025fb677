//! Dense complex kernels shared by every stage of the pipeline.

mod dft;
mod eigen;
mod inverse;
mod poly;

pub use dft::ifft_padded;
pub use eigen::{hermitian_evd, EigenDecomposition};
pub use inverse::regularized_inverse;
pub use poly::{polynomial_roots, ComplexPolynomial};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Relative Hermitian tolerance accepted by the decomposition kernels.
pub const HERMITIAN_TOL: f64 = 1e-8;

pub fn frobenius(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `‖A − Aᴴ‖_F / ‖A‖_F`, zero for the zero matrix.
pub fn hermitian_defect(a: &CMatrix) -> f64 {
    let norm = frobenius(a);
    if norm == 0.0 {
        return 0.0;
    }
    let mut acc = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            acc += (a[(i, j)] - a[(j, i)].conj()).norm_sqr();
        }
    }
    acc.sqrt() / norm
}

/// Replaces `A` with `(A + Aᴴ)/2` in place.
pub fn hermitianize(a: &mut CMatrix) {
    let n = a.nrows();
    for j in 0..n {
        a[(j, j)].im = 0.0;
        for i in (j + 1)..n {
            let avg = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            a[(i, j)] = avg;
            a[(j, i)] = avg.conj();
        }
    }
}

/// Orthogonal projector `I − V (VᴴV)⁻¹ Vᴴ` onto the complement of span(V).
pub fn complement_projector(v: &CMatrix) -> crate::Result<CMatrix> {
    let n = v.nrows();
    let gram = v.adjoint() * v;
    let gram_inv = regularized_inverse(&gram, 0.0)?;
    let mut p = -(v * gram_inv * v.adjoint());
    for i in 0..n {
        p[(i, i)] += C64::new(1.0, 0.0);
    }
    hermitianize(&mut p);
    Ok(p)
}

pub(crate) fn check_finite(a: &CMatrix, what: &str) -> crate::Result<()> {
    if a.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(crate::error::contract(format!(
            "{what} has non-finite entries"
        )))
    }
}
