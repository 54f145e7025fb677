//! MVDR space-time receive filter, output SCNR and IFFT range estimation.

use crate::error::{contract, Result};
use crate::estimator::{sandwich, signature, Estimate};
use crate::numerics::{
    complement_projector, ifft_padded, regularized_inverse, CMatrix, CVector, C64,
};
use crate::scene::{FilterCovariance, ScenarioConfig, SnapshotComponents, SpaceTimeSnapshotSet};
use crate::SPEED_OF_LIGHT;

#[derive(Debug, Clone)]
pub struct ReceiveFilter {
    pub weights: CVector,
    pub steering: CVector,
    pub load: f64,
}

impl ReceiveFilter {
    /// `u = Ψ/‖Ψ‖²`.
    pub fn matched(steering: &CVector) -> Result<Self> {
        let energy = steering.norm_squared();
        if energy == 0.0 {
            return Err(contract("steering vector must be nonzero"));
        }
        Ok(Self {
            weights: steering / C64::new(energy, 0.0),
            steering: steering.clone(),
            load: 0.0,
        })
    }

    /// `uᴴ x`.
    pub fn response(&self, x: &CVector) -> C64 {
        self.weights.dotc(x)
    }

    /// `uᴴ Y`, one output per column.
    pub fn apply(&self, y: &CMatrix) -> Vec<C64> {
        (self.weights.adjoint() * y).iter().copied().collect()
    }
}

/// `fraction·tr(R)/p`, a fraction of the mean eigenvalue.
pub fn default_load(r: &CMatrix, fraction: f64) -> f64 {
    let p = r.nrows() as f64;
    let trace: f64 = (0..r.nrows()).map(|i| r[(i, i)].re).sum();
    fraction * trace / p
}

/// `u = (R + εI)⁻¹Ψ / (Ψᴴ(R + εI)⁻¹Ψ)`.
pub fn mvdr_weights(r: &CMatrix, steering: &CVector, load: f64) -> Result<ReceiveFilter> {
    if steering.norm_squared() == 0.0 {
        return Err(contract("steering vector must be nonzero"));
    }
    if r.nrows() != steering.len() {
        return Err(contract("covariance and steering dimensions differ"));
    }
    let inv = regularized_inverse(r, load)?;
    let w = inv * steering;
    let gain = steering.dotc(&w);
    if gain.norm() == 0.0 || !gain.is_finite() {
        return Err(crate::Error::Singular {
            condition: f64::INFINITY,
        });
    }
    // uᴴΨ = conj(Ψᴴw/gain) = 1
    Ok(ReceiveFilter {
        weights: w / gain.conj(),
        steering: steering.clone(),
        load,
    })
}

/// Numerator and denominator of the output SCNR, kept apart so trials can
/// be pooled before the ratio.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ScnrParts {
    pub signal: f64,
    pub interference: f64,
}

impl ScnrParts {
    pub fn accumulate(&mut self, other: ScnrParts) {
        self.signal += other.signal;
        self.interference += other.interference;
    }

    /// `10·log10(signal/interference)`; `+∞` when the interference is zero.
    pub fn db(&self) -> f64 {
        if self.interference == 0.0 {
            return f64::INFINITY;
        }
        10.0 * (self.signal / self.interference).log10()
    }
}

/// `Σ_k |uᴴt_k|²` over `Σ_k |uᴴ(c_k + z_k)|²`.
pub fn scnr(filter: &ReceiveFilter, components: &SnapshotComponents) -> ScnrParts {
    let signal = filter
        .apply(&components.target)
        .iter()
        .map(|z| z.norm_sqr())
        .sum();
    let interference = filter
        .apply(&(&components.clutter + &components.noise))
        .iter()
        .map(|z| z.norm_sqr())
        .sum();
    ScnrParts {
        signal,
        interference,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RangeProfile {
    /// `|IFFT(uᴴŷ_k)|²` per bin.
    pub power: Vec<f64>,
    /// Metres per bin, `c/(Δf·N_A)`.
    pub bin_width: f64,
    pub peak_bin: usize,
}

pub fn range_profile(
    filter: &ReceiveFilter,
    snapshots: &CMatrix,
    size: usize,
    subcarrier_spacing_hz: f64,
) -> Result<RangeProfile> {
    let s = filter.apply(snapshots);
    let power: Vec<f64> = ifft_padded(&s, size)?
        .iter()
        .map(|z| z.norm_sqr())
        .collect();
    let peak_bin = power
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, &p)| {
            if p > best.1 {
                (i, p)
            } else {
                best
            }
        })
        .0;
    Ok(RangeProfile {
        power,
        bin_width: SPEED_OF_LIGHT / (subcarrier_spacing_hz * size as f64),
        peak_bin,
    })
}

/// Raw-bin bistatic range, no interpolation.
pub fn estimate_range(profile: &RangeProfile) -> f64 {
    profile.peak_bin as f64 * profile.bin_width
}

/// Covariance the MVDR stage inverts.
pub fn filter_covariance(
    r: &CMatrix,
    steering: &CVector,
    mode: FilterCovariance,
    noise_floor: f64,
) -> Result<CMatrix> {
    let p = complement_projector(&CMatrix::from_columns(std::slice::from_ref(steering)))?;
    let mut out = sandwich(&p, r);
    if mode == FilterCovariance::NoiseFilled {
        let unit = steering / C64::new(steering.norm(), 0.0);
        out += (&unit * unit.adjoint()) * C64::new(noise_floor, 0.0);
    }
    Ok(out)
}

/// Lower bound on the diagonal load relative to the mean eigenvalue of the
/// unprojected covariance.
pub const LOAD_FLOOR: f64 = 1e-10;

/// Filter design, SCNR and range for one frame.
#[derive(Debug, Clone)]
pub struct FilterOutcome {
    pub filter: ReceiveFilter,
    /// Present when the snapshots carry their components.
    pub scnr: Option<ScnrParts>,
    pub profile: RangeProfile,
    pub range: f64,
}

/// Runs the filter stage on the estimator's selected target; `None` when
/// no target was selected.
pub fn filter_stage(
    snapshots: &SpaceTimeSnapshotSet,
    estimate: &Estimate,
    cfg: &ScenarioConfig,
) -> Result<Option<FilterOutcome>> {
    let Some(target) = estimate.target() else {
        return Ok(None);
    };
    let steering = signature(target, &snapshots.grid, cfg.wavelength())?;
    let decomp = &estimate.decomposition;
    let r_tilde = filter_covariance(
        &decomp.covariance,
        &steering,
        cfg.filter_covariance,
        decomp.noise_floor(),
    )?;
    // Noiseless frames leave R̃ at round-off level; keep the load above it.
    let load = default_load(&r_tilde, cfg.diag_load)
        .max(LOAD_FLOOR * default_load(&decomp.covariance, 1.0));
    let filter = mvdr_weights(&r_tilde, &steering, load)?;
    let scnr = snapshots.components.as_ref().map(|c| scnr(&filter, c));
    let profile = range_profile(
        &filter,
        &snapshots.snapshots,
        cfg.range_fft_size,
        cfg.subcarrier_spacing_hz,
    )?;
    let range = estimate_range(&profile);
    Ok(Some(FilterOutcome {
        filter,
        scnr,
        profile,
        range,
    }))
}
