use std::f64::consts::PI;

use super::SpaceTimeGrid;
use crate::error::{contract, Result};
use crate::numerics::{CVector, C64};

/// Half-wavelength ULA response, element `n` = `exp(jπ n sin θ)`.
/// `theta_deg` is broadside-referenced.
pub fn steering_vector(theta_deg: f64, n: usize) -> CVector {
    let phase = PI * theta_deg.to_radians().sin();
    CVector::from_iterator(n, (0..n).map(|i| C64::from_polar(1.0, phase * i as f64)))
}

/// Slow-time phase progression `exp(j2π m T_s f_D)`, m = 0..M_s−1.
pub fn doppler_vector(f_d: f64, grid: &SpaceTimeGrid) -> CVector {
    let phase = 2.0 * PI * grid.symbol_duration * f_d;
    CVector::from_iterator(
        grid.symbols,
        (0..grid.symbols).map(|m| C64::from_polar(1.0, phase * m as f64)),
    )
}

/// `d(f_D) ⊗ a_Rx(θ)`: symbol index outer, antenna index inner.
pub fn space_time_vector(f_d: f64, theta_deg: f64, grid: &SpaceTimeGrid) -> Result<CVector> {
    let nyquist = 1.0 / (2.0 * grid.symbol_duration);
    if !(f_d.abs() < nyquist) {
        return Err(contract(format!(
            "Doppler {f_d} Hz aliases (|f_D| must stay below {nyquist} Hz)"
        )));
    }
    Ok(kron(
        &doppler_vector(f_d, grid),
        &steering_vector(theta_deg, grid.antennas),
    ))
}

pub(crate) fn kron(outer: &CVector, inner: &CVector) -> CVector {
    let n = inner.len();
    CVector::from_fn(outer.len() * n, |i, _| outer[i / n] * inner[i % n])
}
