use std::f64::consts::PI;

use rustfft::FftPlanner;

use super::covariance::{noise_projector_from_signal, spatial_covariance, CovarianceDecomposition};
use crate::error::{contract, Error, Result};
use crate::numerics::{hermitian_evd, polynomial_roots, CMatrix, ComplexPolynomial, C64};
use crate::scene::{steering_vector, AoaStrategy, SpaceTimeGrid};

/// Roots further than this from the unit circle are treated as spurious.
pub const MAX_ROOT_DISTANCE: f64 = 0.5;

/// Roots closer than this after folding are one root split by round-off.
const ROOT_MERGE_TOL: f64 = 1e-5;

/// Picks the `count` roots nearest the unit circle.
///
/// Roots outside the circle are folded to their conjugate reciprocals first,
/// so each reciprocal pair (and each near-circle double root) counts once.
pub fn select_roots(roots: &[C64], count: usize) -> Vec<C64> {
    let mut folded: Vec<C64> = roots
        .iter()
        .filter(|r| r.norm() > 0.0 && r.is_finite())
        .map(|&r| if r.norm() > 1.0 { 1.0 / r.conj() } else { r })
        .filter(|r| 1.0 - r.norm() <= MAX_ROOT_DISTANCE)
        .collect();
    folded.sort_by(|a, b| (1.0 - a.norm()).total_cmp(&(1.0 - b.norm())));

    let mut picked: Vec<C64> = Vec::with_capacity(count);
    for r in folded {
        if picked.len() == count {
            break;
        }
        if picked.iter().all(|p| (p - r).norm() > ROOT_MERGE_TOL) {
            picked.push(r);
        }
    }
    picked
}

/// Broadside angle of a spatial root `exp(jπ sin θ)`.
pub fn root_to_angle_deg(z: C64) -> f64 {
    (z.arg() / PI).clamp(-1.0, 1.0).asin().to_degrees()
}

/// Doppler of a slow-time root `exp(j2π T_s f_D)`.
pub fn root_to_doppler_hz(z: C64, symbol_duration: f64) -> f64 {
    z.arg() / (2.0 * PI * symbol_duration)
}

/// Ascending coefficients of `Σ_{p,q} z^{q−p} X_pq`, shifted by `n − 1` so
/// the lowest power is zero. `X` is square of size `n`.
pub fn diagonal_sum_polynomial(x: &CMatrix) -> Result<ComplexPolynomial> {
    let n = x.nrows();
    let mut c = vec![C64::new(0.0, 0.0); 2 * n - 1];
    for p in 0..n {
        for q in 0..n {
            c[q + n - 1 - p] += x[(p, q)];
        }
    }
    ComplexPolynomial::new(c)
}

/// `F_ij = a(θ)ᴴ Λ_ij a(θ)`, the `M_s × M_s` slow-time compression of `Λ`.
pub fn doppler_matrix(lambda: &CMatrix, theta_deg: f64, grid: &SpaceTimeGrid) -> CMatrix {
    let a = steering_vector(theta_deg, grid.antennas);
    compress_blocks(lambda, &a, grid)
}

pub(crate) fn compress_blocks(
    lambda: &CMatrix,
    a: &crate::numerics::CVector,
    grid: &SpaceTimeGrid,
) -> CMatrix {
    let n = grid.antennas;
    let m = grid.symbols;
    // W = Λ (I ⊗ a), then F = (I ⊗ a)ᴴ W
    let mut w = CMatrix::zeros(m * n, m);
    for j in 0..m {
        let col = lambda.columns(j * n, n) * a;
        w.set_column(j, &col);
    }
    CMatrix::from_fn(m, m, |i, j| {
        let block = w.view((i * n, j), (n, 1));
        a.iter()
            .zip(block.iter())
            .map(|(ap, wp)| ap.conj() * wp)
            .sum()
    })
}

/// AoA estimates (broadside degrees) for the `decomp.sources` detected sources.
pub fn rootmusic_aoa(decomp: &CovarianceDecomposition, strategy: AoaStrategy) -> Result<Vec<f64>> {
    let count = decomp.sources;
    if count == 0 {
        return Err(contract("rootMUSIC AoA needs at least one source"));
    }
    let roots = match strategy {
        AoaStrategy::Spatial => {
            let grid = &decomp.grid;
            if count >= grid.antennas {
                return Err(Error::Estimation {
                    reason: format!("{count} sources exceed the spatial aperture"),
                    wanted: count,
                    partial: Vec::new(),
                });
            }
            let rs = spatial_covariance(&decomp.covariance, grid);
            let eig = hermitian_evd(&rs)?;
            let lambda = noise_projector_from_signal(&eig.leading_vectors(count));
            polynomial_roots(&diagonal_sum_polynomial(&lambda)?)?
        }
        AoaStrategy::RankReduction => {
            let poly = rank_reduction_polynomial(&decomp.noise_projector(), &decomp.grid)?;
            polynomial_roots(&poly)?
        }
    };
    let picked = select_roots(&roots, count);
    let angles: Vec<f64> = picked.iter().map(|&z| root_to_angle_deg(z)).collect();
    if angles.len() < count {
        return Err(Error::Estimation {
            reason: "too few admissible AoA roots".into(),
            wanted: count,
            partial: angles,
        });
    }
    Ok(angles)
}

/// `z^{M_s(N_R−1)} det Q(z)` with `Q(z)_ij = Σ_{p,q} z^{q−p} [Λ_ij]_pq`,
/// interpolated from unit-circle samples.
pub fn rank_reduction_polynomial(
    lambda: &CMatrix,
    grid: &SpaceTimeGrid,
) -> Result<ComplexPolynomial> {
    let n = grid.antennas;
    let m = grid.symbols;
    let half = m * (n - 1);
    let degree = 2 * half;
    let samples = (degree + 1).next_power_of_two();

    let mut values: Vec<C64> = (0..samples)
        .map(|s| {
            let w = 2.0 * PI * s as f64 / samples as f64;
            let a = crate::numerics::CVector::from_fn(n, |p, _| C64::from_polar(1.0, w * p as f64));
            let q = compress_blocks(lambda, &a, grid);
            q.determinant() * C64::from_polar(1.0, w * half as f64)
        })
        .collect();
    FftPlanner::new()
        .plan_fft_forward(samples)
        .process(&mut values);
    let scale = 1.0 / samples as f64;
    let coefficients = values[..=degree].iter().map(|v| v * scale).collect();
    ComplexPolynomial::new(coefficients)
}

/// Bistatic velocity of the source at broadside angle `theta_deg`.
/// Smallest generalized eigenvalue of `(F_Λ(θ), F_P(θ))`, i.e. the minimum
/// over Doppler vectors `d` of `Ψᴴ Λ Ψ / Ψᴴ P Ψ` with `Ψ = d ⊗ a(θ)`. Zero
/// where the projected manifold `P Ψ` meets the null space of `Λ`; with
/// `P = I` it is the rank-reduction spectrum. Infinite where `P` removes
/// the whole manifold.
pub fn projected_null_spectrum(
    lambda: &CMatrix,
    p: &CMatrix,
    theta_deg: f64,
    grid: &SpaceTimeGrid,
) -> f64 {
    let a = steering_vector(theta_deg, grid.antennas);
    let num = compress_blocks(lambda, &a, grid);
    let Some(chol) = compress_blocks(p, &a, grid).cholesky() else {
        return f64::INFINITY;
    };
    let Some(l_inv) = chol.l().try_inverse() else {
        return f64::INFINITY;
    };
    let m = &l_inv * num * l_inv.adjoint();
    let m = (&m + m.adjoint()) * C64::new(0.5, 0.0);
    m.symmetric_eigenvalues().min().max(0.0)
}

/// Scan step of [`projected_null_minima`], degrees.
pub const MINIMA_SCAN_STEP: f64 = 0.5;

/// The `count` deepest local minima of [`projected_null_spectrum`] over
/// broadside angles in `(lo, hi)`, each polished by golden-section search.
/// Deepest first.
pub fn projected_null_minima(
    lambda: &CMatrix,
    p: &CMatrix,
    grid: &SpaceTimeGrid,
    (lo, hi): (f64, f64),
    count: usize,
) -> Vec<f64> {
    let lo = lo.max(-90.0);
    let hi = hi.min(90.0);
    let spectrum = |t: f64| projected_null_spectrum(lambda, p, t, grid);
    let steps = ((hi - lo) / MINIMA_SCAN_STEP).ceil().max(2.0) as usize - 1;
    let step = (hi - lo) / (steps + 1) as f64;
    let thetas: Vec<f64> = (0..steps).map(|i| lo + step * (i + 1) as f64).collect();
    let values: Vec<f64> = thetas.iter().map(|&t| spectrum(t)).collect();
    let mut minima: Vec<(f64, f64)> = (0..steps)
        .filter(|&i| {
            values[i].is_finite()
                && (i == 0 || values[i] <= values[i - 1])
                && (i + 1 == steps || values[i] < values[i + 1])
        })
        .map(|i| {
            let t = golden_section(&spectrum, thetas[i] - step, thetas[i] + step);
            (t, spectrum(t))
        })
        .collect();
    minima.sort_by(|a, b| a.1.total_cmp(&b.1));
    minima.into_iter().take(count).map(|m| m.0).collect()
}

fn golden_section(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - ratio * (hi - lo);
    let mut b = lo + ratio * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    while hi - lo > 1e-9 {
        if fa <= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - ratio * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + ratio * (hi - lo);
            fb = f(b);
        }
    }
    0.5 * (lo + hi)
}

pub fn rootmusic_doppler(
    lambda: &CMatrix,
    theta_deg: f64,
    grid: &SpaceTimeGrid,
    wavelength: f64,
) -> Result<f64> {
    let f = doppler_matrix(lambda, theta_deg, grid);
    let roots = polynomial_roots(&diagonal_sum_polynomial(&f)?)?;
    match select_roots(&roots, 1).first() {
        Some(&z) => Ok(root_to_doppler_hz(z, grid.symbol_duration) * wavelength),
        None => Err(Error::Estimation {
            reason: "no admissible Doppler root".into(),
            wanted: 1,
            partial: Vec::new(),
        }),
    }
}
