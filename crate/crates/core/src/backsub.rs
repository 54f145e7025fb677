//! Background-subtraction benchmark: capture a clutter-only reference frame,
//! subtract it from the measurement and run the shared estimator.

use rand::Rng;

use crate::error::Result;
use crate::estimator::{estimate, Estimate, EstimatorSettings};
use crate::geometry::invert_from_estimates;
use crate::scene::{
    clutter_echoes, path_amplitude, synthesize_echoes, Echo, GroundTruth, PathLegs, ScenarioConfig,
    SpaceTimeSnapshotSet,
};
use crate::stfilter::{filter_stage, FilterOutcome};
use crate::SPEED_OF_LIGHT;

/// Velocity of the extra scatterer in a perturbed reference, m/s.
pub const PERTURBER_VELOCITY: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReferenceMode {
    /// Clutter plus fresh noise.
    Ideal,
    /// Additionally a point scatterer `delta_theta_deg` away from the target
    /// AoA on the same bistatic ellipse.
    Perturbed { delta_theta_deg: f64 },
}

#[derive(Debug, Clone)]
pub struct ReferenceCapture {
    pub mode: ReferenceMode,
    /// Components: the perturbing scatterer, when present, is booked as clutter.
    pub reference: SpaceTimeSnapshotSet,
}

/// Echo of the perturbing scatterer: AoA `θ_r + Δθ`, same `d_Bis`, RCS `α_RCS,t`.
pub fn perturber_echo(
    cfg: &ScenarioConfig,
    truth: &GroundTruth,
    delta_theta_deg: f64,
) -> Result<Echo> {
    let layout = cfg.layout()?;
    let sol = invert_from_estimates(truth.theta_r() + delta_theta_deg, truth.d_bis(), &layout)?;
    let amp = path_amplitude(
        PathLegs::Target {
            d_tx: sol.d_tx,
            d_rx: sol.d_rx,
        },
        cfg,
    );
    Ok(Echo {
        aoa_deg: sol.theta_r,
        aod_deg: sol.theta_t,
        doppler_hz: PERTURBER_VELOCITY / cfg.wavelength(),
        delay_s: sol.d_bis / SPEED_OF_LIGHT,
        gain: crate::numerics::C64::new(amp / (cfg.tx_power_w() * cfg.tx_gain).sqrt(), 0.0),
    })
}

/// Synthesizes the reference frame with its own symbol and noise streams.
/// The clutter realization is the one in `truth`.
pub fn capture_reference<R: Rng + ?Sized>(
    cfg: &ScenarioConfig,
    truth: &GroundTruth,
    mode: ReferenceMode,
    symbol_rng: &mut R,
    noise_rng: &mut R,
) -> Result<ReferenceCapture> {
    let mut clutter = clutter_echoes(cfg, truth);
    if let ReferenceMode::Perturbed { delta_theta_deg } = mode {
        clutter.push(perturber_echo(cfg, truth, delta_theta_deg)?);
    }
    let reference = synthesize_echoes(cfg, truth.theta_t(), &[], &clutter, symbol_rng, noise_rng)?;
    Ok(ReferenceCapture { mode, reference })
}

#[derive(Debug, Clone)]
pub struct BacksubOutcome {
    pub residual: SpaceTimeSnapshotSet,
    pub estimate: Estimate,
    pub filter: Option<FilterOutcome>,
}

/// `ŷ − y_ref`, then the proposed estimator and filter on the residual.
pub fn subtract_and_estimate(
    snapshots: &SpaceTimeSnapshotSet,
    reference: &ReferenceCapture,
    cfg: &ScenarioConfig,
) -> Result<BacksubOutcome> {
    if snapshots.snapshots.shape() != reference.reference.snapshots.shape() {
        return Err(crate::error::contract(
            "reference and measurement shapes differ",
        ));
    }
    let residual = snapshots.subtract(&reference.reference);
    let estimate = estimate(&residual, &EstimatorSettings::from_config(cfg))?;
    let filter = filter_stage(&residual, &estimate, cfg)?;
    Ok(BacksubOutcome {
        residual,
        estimate,
        filter,
    })
}
