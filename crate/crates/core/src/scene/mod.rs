//! Ground truth and received-signal synthesis for one OFDM frame.

mod clutter;
mod config;
mod steering;
mod synth;

pub use clutter::{
    bistatic_received_power, complex_gaussian, draw_clutter_rays, path_amplitude, ClutterRays,
    PathLegs,
};
pub use config::{dbm_to_watts, AoaStrategy, FilterCovariance, RefineMode, ScenarioConfig};
pub use steering::{doppler_vector, space_time_vector, steering_vector};
pub use synth::{
    clutter_echoes, qam_symbol, synthesize, synthesize_echoes, target_echo, Echo,
    SnapshotComponents, SpaceTimeSnapshotSet,
};

use crate::error::Result;
use crate::geometry::{clutter_path, BistaticSolution, ClutterPath};

/// Dimensions of the stacked space-time snapshot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceTimeGrid {
    pub symbols: usize,
    pub antennas: usize,
    /// Symbol duration including cyclic prefix, seconds.
    pub symbol_duration: f64,
}

impl SpaceTimeGrid {
    /// `M_s · N_R`.
    pub fn dim(&self) -> usize {
        self.symbols * self.antennas
    }
}

/// Everything needed to synthesize one frame: geometry, kinematics, and the
/// clutter realization.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub geometry: BistaticSolution,
    /// Bistatic velocity, m/s.
    pub v_t: f64,
    pub tau_t: f64,
    pub f_dt: f64,
    pub clutter: ClutterPath,
    pub f_dc: f64,
    pub rays: ClutterRays,
}

impl GroundTruth {
    /// Places the clutter object per the config and derives delays and Dopplers.
    pub fn new(
        cfg: &ScenarioConfig,
        geometry: BistaticSolution,
        v_t: f64,
        rays: ClutterRays,
    ) -> Result<Self> {
        let layout = cfg.layout()?;
        let clutter_point = layout.point_from_rx(cfg.clutter_aoa_deg, cfg.clutter_range);
        let clutter = clutter_path(geometry.target, clutter_point, &layout)?;
        let lambda = cfg.wavelength();
        Ok(Self {
            tau_t: geometry.tau(),
            f_dt: v_t / lambda,
            f_dc: cfg.clutter_velocity / lambda,
            geometry,
            v_t,
            clutter,
            rays,
        })
    }

    pub fn theta_t(&self) -> f64 {
        self.geometry.theta_t
    }

    pub fn theta_r(&self) -> f64 {
        self.geometry.theta_r
    }

    pub fn d_bis(&self) -> f64 {
        self.geometry.d_bis
    }

    pub fn tau_c(&self) -> f64 {
        self.clutter.tau_c
    }
}
