//! Joint AoA/Doppler subspace estimation and target selection.
//!
//! Angles in this module are broadside-referenced (the array's own
//! convention); [`crate::geometry::broadside_deg`] converts to and from the
//! baseline-referenced angles used by the geometry.

mod covariance;
mod music2d;
mod rootmusic;

pub use covariance::{
    covariance_of_columns, mdl_order, sample_covariance, spatial_covariance,
    CovarianceDecomposition,
};
pub use music2d::{
    music2d_search, music2d_spectrum, null_spectrum, projector_from_noise, spectrum_peaks,
    MusicSearch,
};
pub use rootmusic::{
    diagonal_sum_polynomial, doppler_matrix, projected_null_minima, projected_null_spectrum,
    rank_reduction_polynomial, root_to_angle_deg, root_to_doppler_hz, rootmusic_aoa,
    rootmusic_doppler, select_roots, MAX_ROOT_DISTANCE,
};

use crate::error::{contract, Error, Result};
use crate::numerics::{complement_projector, hermitianize, CMatrix, CVector};
use crate::scene::{
    space_time_vector, AoaStrategy, RefineMode, ScenarioConfig, SpaceTimeGrid, SpaceTimeSnapshotSet,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleVelocity {
    /// Broadside degrees.
    pub theta_deg: f64,
    /// Bistatic velocity, m/s.
    pub velocity: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EstimateSet {
    pub pairs: Vec<AngleVelocity>,
    pub target_index: Option<usize>,
    pub theta_refined: Option<f64>,
}

impl EstimateSet {
    pub fn new(pairs: Vec<AngleVelocity>) -> Self {
        Self {
            pairs,
            target_index: None,
            theta_refined: None,
        }
    }

    pub fn target(&self) -> Option<AngleVelocity> {
        self.target_index.map(|i| self.pairs[i])
    }

    /// Refined target angle when available, else the raw one.
    pub fn target_theta(&self) -> Option<f64> {
        self.target()
            .map(|t| self.theta_refined.unwrap_or(t.theta_deg))
    }
}

/// Drops pairs slower than `v_min` and marks the fastest survivor. Ties go to
/// the lower index.
pub fn select_target(mut set: EstimateSet, v_min: f64) -> EstimateSet {
    let mut best: Option<(usize, f64)> = None;
    for (i, p) in set.pairs.iter().enumerate() {
        let speed = p.velocity.abs();
        if speed < v_min {
            continue;
        }
        if best.is_none_or(|(_, b)| speed > b) {
            best = Some((i, speed));
        }
    }
    set.target_index = best.map(|(i, _)| i);
    set
}

/// Knobs the estimator reads from the scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorSettings {
    pub strategy: AoaStrategy,
    pub refine_mode: RefineMode,
    pub v_min: f64,
    pub wavelength: f64,
}

impl EstimatorSettings {
    pub fn from_config(cfg: &ScenarioConfig) -> Self {
        Self {
            strategy: cfg.aoa_strategy,
            refine_mode: cfg.refine_mode,
            v_min: cfg.v_min,
            wavelength: cfg.wavelength(),
        }
    }
}

/// One (AoA, velocity) pair per detected source.
pub fn estimate_pairs(
    decomp: &CovarianceDecomposition,
    settings: &EstimatorSettings,
) -> Result<Vec<AngleVelocity>> {
    let thetas = rootmusic_aoa(decomp, settings.strategy)?;
    let lambda = decomp.noise_projector();
    thetas
        .into_iter()
        .map(|theta_deg| {
            let velocity =
                rootmusic_doppler(&lambda, theta_deg, &decomp.grid, settings.wavelength)?;
            Ok(AngleVelocity {
                theta_deg,
                velocity,
            })
        })
        .collect()
}

/// Space-time signature for an (AoA, velocity) estimate.
pub fn signature(pair: AngleVelocity, grid: &SpaceTimeGrid, wavelength: f64) -> Result<CVector> {
    space_time_vector(pair.velocity / wavelength, pair.theta_deg, grid)
}

/// `P R P` Hermitianized.
pub fn sandwich(p: &CMatrix, r: &CMatrix) -> CMatrix {
    let mut out = p * r * p;
    hermitianize(&mut out);
    out
}

/// Projection-based refinement of the target AoA.
pub fn refine_aoa(
    r: &CMatrix,
    grid: SpaceTimeGrid,
    target: AngleVelocity,
    sources: usize,
    settings: &EstimatorSettings,
) -> Result<f64> {
    if sources <= 1 {
        return Ok(target.theta_deg);
    }
    let psi_t = signature(target, &grid, settings.wavelength)?;
    let p_t = complement_projector(&CMatrix::from_columns(&[psi_t]))?;
    let r_tilde = sandwich(&p_t, r);

    match settings.refine_mode {
        RefineMode::Literal => {
            let d = CovarianceDecomposition::with_sources(r_tilde, grid, sources)?;
            let thetas = rootmusic_aoa(&d, settings.strategy)?;
            Ok(thetas
                .into_iter()
                .min_by(|a, b| {
                    (a - target.theta_deg)
                        .abs()
                        .total_cmp(&(b - target.theta_deg).abs())
                })
                .expect("rootmusic_aoa returns `sources` angles"))
        }
        RefineMode::TwoStep => {
            let clutter = projected_pairs(r, &p_t, target.theta_deg, sources - 1, grid, settings)?;
            let sigs = clutter
                .iter()
                .map(|&p| signature(p, &grid, settings.wavelength))
                .collect::<Result<Vec<_>>>()?;
            let p_c = complement_projector(&CMatrix::from_columns(&sigs))?;
            let cleaned = CovarianceDecomposition::with_sources(sandwich(&p_c, r), grid, 1)?;
            let lambda = sandwich(&p_c, &cleaned.noise_projector());
            let window = (
                target.theta_deg - REFINE_WINDOW_DEG,
                target.theta_deg + REFINE_WINDOW_DEG,
            );
            projected_null_minima(&lambda, &p_c, &grid, window, 1)
                .first()
                .copied()
                .ok_or_else(|| contract("refinement returned no angle"))
        }
    }
}

/// Half-width of the AoA window searched around the initial target estimate.
pub const REFINE_WINDOW_DEG: f64 = 1.0;

/// `count` sources of `P R P` away from the nulled direction `nulled_deg`.
/// A projected source is no longer a steering vector, so nulls are searched
/// over the projected manifold `P Ψ(θ, f)` with the projected null spectrum.
fn projected_pairs(
    r: &CMatrix,
    p: &CMatrix,
    nulled_deg: f64,
    count: usize,
    grid: SpaceTimeGrid,
    settings: &EstimatorSettings,
) -> Result<Vec<AngleVelocity>> {
    let d = CovarianceDecomposition::with_sources(sandwich(p, r), grid, count)?;
    let lambda = sandwich(p, &d.noise_projector());
    let angles: Vec<f64> = projected_null_minima(&lambda, p, &grid, (-90.0, 90.0), count + 4)
        .into_iter()
        .filter(|t| (t - nulled_deg).abs() > REFINE_WINDOW_DEG)
        .take(count)
        .collect();
    if angles.len() < count {
        return Err(Error::Estimation {
            reason: "too few minima on the projected manifold".into(),
            wanted: count,
            partial: angles,
        });
    }
    angles
        .into_iter()
        .map(|theta_deg| {
            let velocity = rootmusic_doppler(&lambda, theta_deg, &grid, settings.wavelength)?;
            Ok(AngleVelocity {
                theta_deg,
                velocity,
            })
        })
        .collect()
}

/// Estimator output for one frame.
#[derive(Debug, Clone)]
pub struct Estimate {
    pub decomposition: CovarianceDecomposition,
    pub set: EstimateSet,
}

impl Estimate {
    /// Final target (refined AoA, velocity), if a target was selected.
    pub fn target(&self) -> Option<AngleVelocity> {
        let t = self.set.target()?;
        Some(AngleVelocity {
            theta_deg: self.set.target_theta()?,
            velocity: t.velocity,
        })
    }
}

/// Covariance, MDL, rootMUSIC pairs, target selection and refinement.
///
/// A failed refinement leaves `theta_refined` unset; the raw target angle is
/// then used downstream.
pub fn estimate(
    snapshots: &SpaceTimeSnapshotSet,
    settings: &EstimatorSettings,
) -> Result<Estimate> {
    let r = sample_covariance(snapshots)?;
    let decomp = CovarianceDecomposition::with_mdl(r, snapshots.grid, snapshots.subcarriers())?;
    if decomp.sources == 0 {
        return Err(Error::Estimation {
            reason: "no sources detected".into(),
            wanted: 1,
            partial: Vec::new(),
        });
    }
    let pairs = estimate_pairs(&decomp, settings)?;
    let mut set = select_target(EstimateSet::new(pairs), settings.v_min);
    if let Some(t) = set.target() {
        set.theta_refined =
            refine_aoa(&decomp.covariance, decomp.grid, t, decomp.sources, settings).ok();
    }
    Ok(Estimate {
        decomposition: decomp,
        set,
    })
}
