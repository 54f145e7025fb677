use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::clutter::{complex_gaussian, path_amplitude, PathLegs};
use super::steering::{space_time_vector, steering_vector};
use super::{GroundTruth, ScenarioConfig, SpaceTimeGrid};
use crate::error::Result;
use crate::geometry::broadside_deg;
use crate::numerics::{CMatrix, CVector, C64};

/// One propagation path as seen by the receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Echo {
    /// Baseline-referenced AoA at the Rx.
    pub aoa_deg: f64,
    /// Baseline-referenced AoD at the Tx.
    pub aod_deg: f64,
    pub doppler_hz: f64,
    pub delay_s: f64,
    /// Complex channel gain excluding transmit power and Tx gain, which the
    /// beamformer carries.
    pub gain: C64,
}

/// Direct Tx → target → Rx path.
pub fn target_echo(cfg: &ScenarioConfig, truth: &GroundTruth) -> Echo {
    let g = &truth.geometry;
    let amp = path_amplitude(
        PathLegs::Target {
            d_tx: g.d_tx,
            d_rx: g.d_rx,
        },
        cfg,
    );
    Echo {
        aoa_deg: g.theta_r,
        aod_deg: g.theta_t,
        doppler_hz: truth.f_dt,
        delay_s: truth.tau_t,
        gain: C64::new(amp / (cfg.tx_power_w() * cfg.tx_gain).sqrt(), 0.0),
    }
}

/// Tx → target → clutter ray → Rx paths. Rays share delay and Doppler and
/// carry the `1/√N_cl` normalization.
pub fn clutter_echoes(cfg: &ScenarioConfig, truth: &GroundTruth) -> Vec<Echo> {
    let c = &truth.clutter;
    let unit = path_amplitude(
        PathLegs::ClutterRay {
            d_tx: c.d_tx,
            d_tc: c.d_tc,
            d_crx: c.d_crx,
            ray_rcs: 1.0,
        },
        cfg,
    ) / (cfg.tx_power_w() * cfg.tx_gain).sqrt();
    let norm = 1.0 / (truth.rays.len() as f64).sqrt();
    truth
        .rays
        .offsets_deg
        .iter()
        .zip(&truth.rays.reflectivities)
        .map(|(&offset, &g)| Echo {
            aoa_deg: c.theta_c + offset,
            aod_deg: truth.theta_t(),
            doppler_hz: truth.f_dc,
            delay_s: c.tau_c,
            gain: g * unit * norm,
        })
        .collect()
}

/// Additive parts of the symbol-removed snapshots.
#[derive(Debug, Clone)]
pub struct SnapshotComponents {
    pub target: CMatrix,
    pub clutter: CMatrix,
    pub noise: CMatrix,
}

/// `K` stacked space-time snapshots, one column per subcarrier.
#[derive(Debug, Clone)]
pub struct SpaceTimeSnapshotSet {
    pub grid: SpaceTimeGrid,
    /// `(M_s·N_R) × K`.
    pub snapshots: CMatrix,
    pub components: Option<SnapshotComponents>,
}

impl SpaceTimeSnapshotSet {
    pub fn subcarriers(&self) -> usize {
        self.snapshots.ncols()
    }

    /// Builds a set without components from raw columns.
    pub fn from_snapshots(grid: SpaceTimeGrid, snapshots: CMatrix) -> Self {
        assert_eq!(
            snapshots.nrows(),
            grid.dim(),
            "snapshot length must be M_s*N_R"
        );
        Self {
            grid,
            snapshots,
            components: None,
        }
    }

    /// Entrywise difference `self − other`, components included when both
    /// sides carry them.
    pub fn subtract(&self, other: &Self) -> Self {
        let components = match (&self.components, &other.components) {
            (Some(a), Some(b)) => Some(SnapshotComponents {
                target: &a.target - &b.target,
                clutter: &a.clutter - &b.clutter,
                noise: &a.noise - &b.noise,
            }),
            _ => None,
        };
        Self {
            grid: self.grid,
            snapshots: &self.snapshots - &other.snapshots,
            components,
        }
    }
}

/// Unit-average-energy square QAM symbol.
pub fn qam_symbol<R: Rng + ?Sized>(order: u32, rng: &mut R) -> C64 {
    let side = (order as f64).sqrt().round() as u32;
    let scale = (2.0 * (order as f64 - 1.0) / 3.0).sqrt();
    let level = |i: u32| (2.0 * i as f64 - side as f64 + 1.0) / scale;
    C64::new(level(rng.gen_range(0..side)), level(rng.gen_range(0..side)))
}

/// Synthesizes the frame for `truth`, drawing symbol and noise substreams from `rng`.
pub fn synthesize<R: Rng + ?Sized>(
    cfg: &ScenarioConfig,
    truth: &GroundTruth,
    rng: &mut R,
) -> Result<SpaceTimeSnapshotSet> {
    let mut symbols = ChaCha8Rng::seed_from_u64(rng.gen());
    let mut noise = ChaCha8Rng::seed_from_u64(rng.gen());
    synthesize_echoes(
        cfg,
        truth.theta_t(),
        &[target_echo(cfg, truth)],
        &clutter_echoes(cfg, truth),
        &mut symbols,
        &mut noise,
    )
}

/// Core synthesis: transmit beam steered at `beam_aod_deg`, each echo applied
/// per subcarrier and symbol, AWGN added, and the data symbol divided out.
pub fn synthesize_echoes<R1: Rng + ?Sized, R2: Rng + ?Sized>(
    cfg: &ScenarioConfig,
    beam_aod_deg: f64,
    target: &[Echo],
    clutter: &[Echo],
    symbol_rng: &mut R1,
    noise_rng: &mut R2,
) -> Result<SpaceTimeSnapshotSet> {
    let grid = cfg.grid();
    let k_count = cfg.subcarriers;
    let beam = steering_vector(broadside_deg(beam_aod_deg), cfg.tx_antennas);
    let beam_scale = (cfg.tx_power_w() * cfg.tx_gain / cfg.tx_antennas as f64).sqrt();

    let clean = |echoes: &[Echo]| -> Result<CMatrix> {
        let mut out = CMatrix::zeros(grid.dim(), k_count);
        for e in echoes {
            let a_tx = steering_vector(broadside_deg(e.aod_deg), cfg.tx_antennas);
            let tx_factor = a_tx.dotc(&beam) * beam_scale;
            let psi: CVector = space_time_vector(e.doppler_hz, broadside_deg(e.aoa_deg), &grid)?
                * (e.gain * tx_factor);
            let step = -2.0 * PI * cfg.subcarrier_spacing_hz * e.delay_s;
            for k in 0..k_count {
                let ramp = C64::from_polar(1.0, step * k as f64);
                out.column_mut(k).axpy(ramp, &psi, C64::new(1.0, 0.0));
            }
        }
        Ok(out)
    };
    let target_clean = clean(target)?;
    let clutter_clean = clean(clutter)?;

    let sigma2 = if cfg.noise { cfg.noise_power_w() } else { 0.0 };
    let n_r = grid.antennas;
    let mut t_out = CMatrix::zeros(grid.dim(), k_count);
    let mut c_out = CMatrix::zeros(grid.dim(), k_count);
    let mut z_out = CMatrix::zeros(grid.dim(), k_count);
    for k in 0..k_count {
        for m in 0..grid.symbols {
            let x = qam_symbol(cfg.qam_order, symbol_rng);
            for n in 0..n_r {
                let row = m * n_r + n;
                let z = if cfg.noise {
                    complex_gaussian(noise_rng, sigma2)
                } else {
                    C64::new(0.0, 0.0)
                };
                // received = (Hᵗ + Hᶜ) w x + z, divided by x per path;
                // x/x is exactly 1 in floating point
                #[allow(clippy::eq_op)]
                let removed = x / x;
                t_out[(row, k)] = target_clean[(row, k)] * removed;
                c_out[(row, k)] = clutter_clean[(row, k)] * removed;
                z_out[(row, k)] = z / x;
            }
        }
    }
    let snapshots = &t_out + &c_out + &z_out;
    Ok(SpaceTimeSnapshotSet {
        grid,
        snapshots,
        components: Some(SnapshotComponents {
            target: t_out,
            clutter: c_out,
            noise: z_out,
        }),
    })
}
