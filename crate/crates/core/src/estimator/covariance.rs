use crate::error::{contract, Result};
use crate::numerics::{hermitian_evd, hermitianize, CMatrix, EigenDecomposition, C64};
use crate::scene::{SpaceTimeGrid, SpaceTimeSnapshotSet};

/// `(1/K) Σ_k ŷ_k ŷ_kᴴ`, Hermitianized.
pub fn sample_covariance(set: &SpaceTimeSnapshotSet) -> Result<CMatrix> {
    covariance_of_columns(&set.snapshots)
}

pub fn covariance_of_columns(y: &CMatrix) -> Result<CMatrix> {
    let k = y.ncols();
    if k == 0 {
        return Err(contract("sample covariance needs at least one snapshot"));
    }
    let mut r = y * y.adjoint();
    r.scale_mut(1.0 / k as f64);
    hermitianize(&mut r);
    Ok(r)
}

/// Spatial (`N_R × N_R`) covariance of all per-symbol snapshots: the mean of
/// the diagonal `N_R × N_R` blocks of a space-time covariance.
pub fn spatial_covariance(r: &CMatrix, grid: &SpaceTimeGrid) -> CMatrix {
    let n = grid.antennas;
    let mut out = CMatrix::zeros(n, n);
    for m in 0..grid.symbols {
        out += r.view((m * n, m * n), (n, n));
    }
    out.scale_mut(1.0 / grid.symbols as f64);
    hermitianize(&mut out);
    out
}

/// Eigenvalues below this fraction of the largest are treated as this
/// fraction, so exactly rank-deficient (noiseless) covariances give a finite
/// description length.
const MDL_RELATIVE_FLOOR: f64 = 1e-12;

/// Minimum-description-length source count.
///
/// Returns `argmin_k −N(p−k)·ln(g_k/a_k) + ½k(2p−k)·ln N` over `k ∈ [0, p−1]`,
/// where `g_k`/`a_k` are the geometric/arithmetic means of the `p−k` smallest
/// eigenvalues.
pub fn mdl_order(eigenvalues: &[f64], snapshots: usize) -> Result<usize> {
    let p = eigenvalues.len();
    if p == 0 {
        return Err(contract("MDL needs at least one eigenvalue"));
    }
    if snapshots < 2 {
        return Err(contract("MDL needs at least two snapshots"));
    }
    if eigenvalues.iter().any(|v| !v.is_finite()) {
        return Err(contract("MDL eigenvalues must be finite"));
    }
    let top = eigenvalues[0].max(0.0);
    for w in eigenvalues.windows(2) {
        if w[1] > w[0] + 1e-12 * top.max(f64::MIN_POSITIVE) {
            return Err(contract("MDL eigenvalues must be sorted descending"));
        }
    }
    if top == 0.0 {
        return Ok(0);
    }
    let floor = top * MDL_RELATIVE_FLOOR;
    let lambdas: Vec<f64> = eigenvalues.iter().map(|&v| v.max(0.0).max(floor)).collect();

    let n = snapshots as f64;
    let ln_n = n.ln();
    let mut best = (f64::INFINITY, 0);
    for k in 0..p {
        let tail = &lambdas[k..];
        let m = tail.len() as f64;
        let arith = tail.iter().sum::<f64>() / m;
        let log_geo = tail.iter().map(|v| v.ln()).sum::<f64>() / m;
        let fit = -n * m * (log_geo - arith.ln());
        let penalty = 0.5 * (k as f64) * (2.0 * p as f64 - k as f64) * ln_n;
        let score = fit + penalty;
        if score < best.0 {
            best = (score, k);
        }
    }
    Ok(best.1)
}

/// Space-time covariance with its spectrum split at the detected source count.
#[derive(Debug, Clone)]
pub struct CovarianceDecomposition {
    pub covariance: CMatrix,
    pub eigen: EigenDecomposition,
    /// Detected (or imposed) number of sources.
    pub sources: usize,
    pub grid: SpaceTimeGrid,
}

impl CovarianceDecomposition {
    /// Decomposes `r` and selects the source count by MDL with `snapshots`
    /// (the number of subcarriers).
    pub fn with_mdl(r: CMatrix, grid: SpaceTimeGrid, snapshots: usize) -> Result<Self> {
        let eigen = hermitian_evd(&r)?;
        let sources = mdl_order(&eigen.eigenvalues, snapshots)?;
        Ok(Self {
            covariance: r,
            eigen,
            sources,
            grid,
        })
    }

    pub fn with_sources(r: CMatrix, grid: SpaceTimeGrid, sources: usize) -> Result<Self> {
        if sources >= r.nrows() {
            return Err(contract(format!(
                "{sources} sources leave no noise subspace in dimension {}",
                r.nrows()
            )));
        }
        let eigen = hermitian_evd(&r)?;
        Ok(Self {
            covariance: r,
            eigen,
            sources,
            grid,
        })
    }

    pub fn signal_subspace(&self) -> CMatrix {
        self.eigen.leading_vectors(self.sources)
    }

    /// Noise eigenvectors, `p − L̂` orthonormal columns.
    pub fn noise_subspace(&self) -> CMatrix {
        self.eigen.trailing_vectors(self.sources)
    }

    /// `Λ = U_z U_zᴴ`, formed as `I − U_s U_sᴴ`.
    pub fn noise_projector(&self) -> CMatrix {
        noise_projector_from_signal(&self.signal_subspace())
    }

    /// Mean of the noise eigenvalues (clamped at zero).
    pub fn noise_floor(&self) -> f64 {
        let tail = &self.eigen.eigenvalues[self.sources..];
        tail.iter().map(|v| v.max(0.0)).sum::<f64>() / tail.len() as f64
    }
}

pub(crate) fn noise_projector_from_signal(us: &CMatrix) -> CMatrix {
    let p = us.nrows();
    let mut lambda = -(us * us.adjoint());
    for i in 0..p {
        lambda[(i, i)] += C64::new(1.0, 0.0);
    }
    hermitianize(&mut lambda);
    lambda
}
