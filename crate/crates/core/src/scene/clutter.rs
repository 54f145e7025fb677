use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use super::ScenarioConfig;
use crate::geometry::MIN_SEGMENT_M;
use crate::numerics::C64;

/// Swerling-I clutter ray draw: angle offsets about the mean clutter AoA and
/// complex reflectivities.
#[derive(Debug, Clone, PartialEq)]
pub struct ClutterRays {
    pub offsets_deg: Vec<f64>,
    /// `E|g|² = α_RCS,c / N_cl`.
    pub reflectivities: Vec<C64>,
}

impl ClutterRays {
    pub fn len(&self) -> usize {
        self.offsets_deg.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets_deg.is_empty()
    }

    /// Same angles, zero reflectivity.
    pub fn silenced(&self) -> Self {
        Self {
            offsets_deg: self.offsets_deg.clone(),
            reflectivities: vec![C64::new(0.0, 0.0); self.len()],
        }
    }

    /// `|Σ gₙ|²`, the aggregate RCS of the scattering object.
    pub fn aggregate_rcs(&self) -> f64 {
        self.reflectivities.iter().sum::<C64>().norm_sqr()
    }
}

/// Circularly symmetric complex Gaussian with `E|z|² = variance`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> C64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(s * re, s * im)
}

pub fn draw_clutter_rays<R: Rng + ?Sized>(cfg: &ScenarioConfig, rng: &mut R) -> ClutterRays {
    let n = cfg.clutter_rays;
    let power = cfg.clutter_rcs / n as f64;
    let mut offsets_deg = Vec::with_capacity(n);
    let mut reflectivities = Vec::with_capacity(n);
    for _ in 0..n {
        let offset = if cfg.angular_spread_deg > 0.0 {
            Normal::new(0.0, cfg.angular_spread_deg)
                .expect("spread validated non-negative")
                .sample(rng)
        } else {
            0.0
        };
        offsets_deg.push(offset);
        reflectivities.push(complex_gaussian(rng, power));
    }
    ClutterRays {
        offsets_deg,
        reflectivities,
    }
}

/// Propagation legs of one echo.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PathLegs {
    /// Tx → target → Rx.
    Target { d_tx: f64, d_rx: f64 },
    /// Tx → target → clutter point → Rx, with ray RCS `|gₙ|²`.
    ClutterRay {
        d_tx: f64,
        d_tc: f64,
        d_crx: f64,
        ray_rcs: f64,
    },
}

/// Bistatic radar equation for a single scatterer, watts.
pub fn bistatic_received_power(
    p_tx_w: f64,
    g_tx: f64,
    g_rx: f64,
    wavelength: f64,
    rcs: f64,
    d_tx: f64,
    d_rx: f64,
) -> f64 {
    p_tx_w * g_tx * g_rx * wavelength.powi(2) * rcs
        / ((4.0 * PI).powi(3) * d_tx.powi(2) * d_rx.powi(2))
}

/// Received amplitude (√watts) of one echo. Clutter rays chain one more
/// isotropic re-radiation, adding a `4π d_tc²` spreading factor.
pub fn path_amplitude(legs: PathLegs, cfg: &ScenarioConfig) -> f64 {
    let p = cfg.tx_power_w();
    let lambda = cfg.wavelength();
    let power = match legs {
        PathLegs::Target { d_tx, d_rx } => {
            assert!(
                d_tx > MIN_SEGMENT_M && d_rx > MIN_SEGMENT_M,
                "legs must exceed 0.1 m"
            );
            bistatic_received_power(
                p,
                cfg.tx_gain,
                cfg.rx_gain,
                lambda,
                cfg.target_rcs,
                d_tx,
                d_rx,
            )
        }
        PathLegs::ClutterRay {
            d_tx,
            d_tc,
            d_crx,
            ray_rcs,
        } => {
            assert!(
                d_tx > MIN_SEGMENT_M && d_tc > MIN_SEGMENT_M && d_crx > MIN_SEGMENT_M,
                "legs must exceed 0.1 m"
            );
            p * cfg.tx_gain * cfg.rx_gain * lambda.powi(2) * cfg.target_rcs * ray_rcs
                / ((4.0 * PI).powi(4) * d_tx.powi(2) * d_tc.powi(2) * d_crx.powi(2))
        }
    };
    power.sqrt()
}
