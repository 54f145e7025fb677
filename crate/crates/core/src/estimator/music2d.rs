use nalgebra::DMatrix;

use super::rootmusic::compress_blocks;
use crate::error::{contract, Result};
use crate::numerics::{hermitianize, CMatrix, CVector};
use crate::scene::{doppler_vector, steering_vector, SpaceTimeGrid};

/// `Λ = U Uᴴ` from orthonormal noise vectors.
pub fn projector_from_noise(u_noise: &CMatrix) -> CMatrix {
    let mut l = u_noise * u_noise.adjoint();
    hermitianize(&mut l);
    l
}

/// `1/‖U_zᴴ Ψ(f, θ)‖²` on the product grid; rows follow `theta_grid`
/// (broadside degrees), columns `fd_grid` (Hz).
pub fn music2d_spectrum(
    u_noise: &CMatrix,
    theta_grid: &[f64],
    fd_grid: &[f64],
    grid: &SpaceTimeGrid,
) -> Result<DMatrix<f64>> {
    if theta_grid.is_empty() || fd_grid.is_empty() {
        return Err(contract("2-D MUSIC grids must be nonempty"));
    }
    if u_noise.nrows() != grid.dim() {
        return Err(contract(
            "noise subspace does not match the space-time grid",
        ));
    }
    Ok(spectrum_from_projector(
        &projector_from_noise(u_noise),
        theta_grid,
        fd_grid,
        grid,
    ))
}

pub(crate) fn spectrum_from_projector(
    lambda: &CMatrix,
    theta_grid: &[f64],
    fd_grid: &[f64],
    grid: &SpaceTimeGrid,
) -> DMatrix<f64> {
    let dopplers: Vec<CVector> = fd_grid.iter().map(|&f| doppler_vector(f, grid)).collect();
    let mut out = DMatrix::zeros(theta_grid.len(), fd_grid.len());
    for (i, &theta) in theta_grid.iter().enumerate() {
        let f = compress_blocks(lambda, &steering_vector(theta, grid.antennas), grid);
        for (j, d) in dopplers.iter().enumerate() {
            let null = (d.adjoint() * &f * d)[(0, 0)].re;
            out[(i, j)] = 1.0 / null.max(f64::MIN_POSITIVE);
        }
    }
    out
}

/// The `count` largest local maxima (8-neighbourhood) as `(row, col)`.
/// Plateaus resolve to their first cell in row-major order.
pub fn spectrum_peaks(spectrum: &DMatrix<f64>, count: usize) -> Vec<(usize, usize)> {
    let (rows, cols) = spectrum.shape();
    let mut peaks = Vec::new();
    for i in 0..rows {
        for j in 0..cols {
            let v = spectrum[(i, j)];
            let mut is_peak = true;
            'scan: for di in -1i64..=1 {
                for dj in -1i64..=1 {
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    let (ni, nj) = (i as i64 + di, j as i64 + dj);
                    if ni < 0 || nj < 0 || ni >= rows as i64 || nj >= cols as i64 {
                        continue;
                    }
                    let w = spectrum[(ni as usize, nj as usize)];
                    let earlier = (ni, nj) < (i as i64, j as i64);
                    if w > v || (earlier && w == v) {
                        is_peak = false;
                        break 'scan;
                    }
                }
            }
            if is_peak {
                peaks.push((i, j));
            }
        }
    }
    peaks.sort_by(|a, b| spectrum[*b].total_cmp(&spectrum[*a]));
    peaks.truncate(count);
    peaks
}

/// Coarse-then-fine 2-D MUSIC search window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MusicSearch {
    pub theta_min: f64,
    pub theta_max: f64,
    pub theta_step: f64,
    pub fd_min: f64,
    pub fd_max: f64,
    pub fd_step: f64,
    pub fine_theta_step: f64,
    pub fine_fd_step: f64,
}

impl Default for MusicSearch {
    fn default() -> Self {
        Self {
            theta_min: -80.0,
            theta_max: 80.0,
            theta_step: 0.25,
            fd_min: -6000.0,
            fd_max: 6000.0,
            fd_step: 25.0,
            fine_theta_step: 0.01,
            fine_fd_step: 1.0,
        }
    }
}

fn axis(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).round() as usize;
    (0..=n).map(|i| lo + step * i as f64).collect()
}

/// Grid-search estimates `(θ deg, f_D Hz)` of the `count` strongest peaks.
pub fn music2d_search(
    u_noise: &CMatrix,
    count: usize,
    grid: &SpaceTimeGrid,
    search: &MusicSearch,
) -> Result<Vec<(f64, f64)>> {
    let lambda = projector_from_noise(u_noise);
    let thetas = axis(search.theta_min, search.theta_max, search.theta_step);
    let fds = axis(search.fd_min, search.fd_max, search.fd_step);
    let coarse = spectrum_from_projector(&lambda, &thetas, &fds, grid);

    let mut out = Vec::with_capacity(count);
    for (i, j) in spectrum_peaks(&coarse, count) {
        let (mut theta, mut fd) = (thetas[i], fds[j]);
        // Re-centre the fine window until the maximum is interior.
        for _ in 0..20 {
            let ft = axis(
                theta - search.theta_step,
                theta + search.theta_step,
                search.fine_theta_step,
            );
            let ff = axis(
                fd - search.fd_step,
                fd + search.fd_step,
                search.fine_fd_step,
            );
            let fine = spectrum_from_projector(&lambda, &ft, &ff, grid);
            let (bi, bj) = fine.iamax_full();
            theta = ft[bi];
            fd = ff[bj];
            if bi > 0 && bj > 0 && bi + 1 < ft.len() && bj + 1 < ff.len() {
                break;
            }
        }
        out.push((theta, fd));
    }
    Ok(out)
}

/// `Ψᴴ Λ Ψ` at one point, the MUSIC null spectrum.
pub fn null_spectrum(lambda: &CMatrix, theta_deg: f64, fd_hz: f64, grid: &SpaceTimeGrid) -> f64 {
    let f = compress_blocks(lambda, &steering_vector(theta_deg, grid.antennas), grid);
    let d = doppler_vector(fd_hz, grid);
    (d.adjoint() * f * d)[(0, 0)].re
}
