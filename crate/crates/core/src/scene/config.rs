use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{NodeLayout, Point};
use crate::SPEED_OF_LIGHT;

/// AoA stage used by the joint estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum AoaStrategy {
    /// 1-D rootMUSIC on the spatial covariance averaged over all symbols.
    #[default]
    Spatial,
    /// Roots of `det Q(z)` built from the joint noise projector blocks.
    RankReduction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RefineMode {
    /// Estimate clutter from the target-projected covariance, null it in the
    /// original covariance, then re-estimate a single AoA.
    #[default]
    TwoStep,
    /// Re-run the AoA stage directly on the target-projected covariance and
    /// keep the root nearest the initial estimate.
    Literal,
}

/// Covariance handed to the MVDR stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum FilterCovariance {
    /// `P_t R P_t` with the nulled target direction refilled at the
    /// estimated noise floor.
    #[default]
    NoiseFilled,
    /// `P_t R P_t` as is; the loaded inverse then reduces to the matched filter.
    Projected,
}

/// Scenario parameters. Keys in the config file are the names in the
/// `rename` attributes; powers are dBm, everything else SI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(rename = "f_c")]
    pub carrier_hz: f64,
    #[serde(rename = "delta_f")]
    pub subcarrier_spacing_hz: f64,
    #[serde(rename = "K")]
    pub subcarriers: usize,
    #[serde(rename = "N_fft")]
    pub fft_size: usize,
    #[serde(rename = "M_s")]
    pub symbols: usize,
    #[serde(rename = "N_T")]
    pub tx_antennas: usize,
    #[serde(rename = "N_R")]
    pub rx_antennas: usize,
    #[serde(rename = "P_Tx")]
    pub tx_power_dbm: f64,
    #[serde(rename = "G_Tx")]
    pub tx_gain: f64,
    #[serde(rename = "G_Rx")]
    pub rx_gain: f64,
    #[serde(rename = "sigma_N2")]
    pub noise_power_dbm: f64,
    #[serde(rename = "alpha_RCS_t")]
    pub target_rcs: f64,
    #[serde(rename = "alpha_RCS_c")]
    pub clutter_rcs: f64,
    #[serde(rename = "N_cl")]
    pub clutter_rays: usize,
    #[serde(rename = "sigma_AS")]
    pub angular_spread_deg: f64,
    #[serde(rename = "theta_c")]
    pub clutter_aoa_deg: f64,
    #[serde(rename = "v_c")]
    pub clutter_velocity: f64,
    #[serde(rename = "T_s")]
    pub symbol_duration: f64,
    pub qam_order: u32,
    pub seed: u64,

    #[serde(rename = "x_Rx")]
    pub rx_x: f64,
    #[serde(rename = "y_Rx")]
    pub rx_y: f64,
    /// Clutter distance from the Rx along `theta_c`.
    #[serde(rename = "d_cRx")]
    pub clutter_range: f64,
    #[serde(rename = "d_Bis_min")]
    pub d_bis_min: f64,
    #[serde(rename = "d_Bis_max")]
    pub d_bis_max: f64,
    pub theta_r_min: f64,
    pub theta_r_max: f64,
    pub v_t_min: f64,
    pub v_t_max: f64,
    /// IFFT size of the range profile.
    #[serde(rename = "N_A")]
    pub range_fft_size: usize,
    /// Zero-velocity discard threshold, m/s.
    pub v_min: f64,
    /// Diagonal load as a fraction of the mean eigenvalue.
    pub diag_load: f64,
    pub aoa_strategy: AoaStrategy,
    pub refine_mode: RefineMode,
    pub filter_covariance: FilterCovariance,
    /// When false, AWGN is omitted entirely.
    pub noise: bool,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            carrier_hz: 28e9,
            subcarrier_spacing_hz: 120e3,
            subcarriers: 792,
            fft_size: 1024,
            symbols: 12,
            tx_antennas: 12,
            rx_antennas: 12,
            tx_power_dbm: 20.0,
            tx_gain: 1.0,
            rx_gain: 1.0,
            noise_power_dbm: -80.0,
            target_rcs: 1.0,
            clutter_rcs: 2.0,
            clutter_rays: 6,
            angular_spread_deg: 3.0,
            clutter_aoa_deg: 10.0,
            clutter_velocity: 0.0,
            // 1/Δf plus the normal cyclic prefix of the 120 kHz numerology
            symbol_duration: 8.92e-6,
            qam_order: 4,
            seed: 0,
            rx_x: 15.0,
            rx_y: 0.0,
            clutter_range: 10.0,
            d_bis_min: 20.0,
            d_bis_max: 40.0,
            theta_r_min: 20.0,
            theta_r_max: 60.0,
            v_t_min: 10.0,
            v_t_max: 15.0,
            range_fft_size: 1024,
            v_min: 0.5,
            diag_load: 1e-6,
            aoa_strategy: AoaStrategy::Spatial,
            refine_mode: RefineMode::TwoStep,
            filter_covariance: FilterCovariance::NoiseFilled,
            noise: true,
        }
    }
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        let positive = [
            ("f_c", self.carrier_hz),
            ("delta_f", self.subcarrier_spacing_hz),
            ("T_s", self.symbol_duration),
            ("G_Tx", self.tx_gain),
            ("G_Rx", self.rx_gain),
            ("d_cRx", self.clutter_range),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return fail(format!("{name} must be positive and finite, got {v}"));
            }
        }
        let finite = [
            ("P_Tx", self.tx_power_dbm),
            ("sigma_N2", self.noise_power_dbm),
            ("alpha_RCS_t", self.target_rcs),
            ("alpha_RCS_c", self.clutter_rcs),
            ("sigma_AS", self.angular_spread_deg),
            ("theta_c", self.clutter_aoa_deg),
            ("v_c", self.clutter_velocity),
            ("x_Rx", self.rx_x),
            ("y_Rx", self.rx_y),
            ("v_min", self.v_min),
            ("diag_load", self.diag_load),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return fail(format!("{name} must be finite, got {v}"));
            }
        }
        for (name, v) in [
            ("alpha_RCS_t", self.target_rcs),
            ("alpha_RCS_c", self.clutter_rcs),
            ("sigma_AS", self.angular_spread_deg),
            ("v_min", self.v_min),
            ("diag_load", self.diag_load),
        ] {
            if v < 0.0 {
                return fail(format!("{name} must be non-negative, got {v}"));
            }
        }
        if self.subcarriers == 0 || self.subcarriers > self.fft_size {
            return fail(format!(
                "need 1 <= K <= N_fft, got K = {}, N_fft = {}",
                self.subcarriers, self.fft_size
            ));
        }
        if self.range_fft_size < self.subcarriers || !self.range_fft_size.is_power_of_two() {
            return fail(format!(
                "N_A must be a power of two >= K, got {}",
                self.range_fft_size
            ));
        }
        if self.symbols == 0 || self.rx_antennas == 0 || self.tx_antennas == 0 {
            return fail("M_s, N_T and N_R must be at least 1".into());
        }
        if self.symbols * self.rx_antennas < 2 || self.rx_antennas < 2 {
            return fail("need N_R >= 2 for angle estimation".into());
        }
        if self.clutter_rays == 0 {
            return fail("N_cl must be at least 1".into());
        }
        if self.symbol_duration < 1.0 / self.subcarrier_spacing_hz {
            return fail(format!(
                "T_s = {} is shorter than 1/delta_f = {}",
                self.symbol_duration,
                1.0 / self.subcarrier_spacing_hz
            ));
        }
        let side = (self.qam_order as f64).sqrt().round() as u32;
        if self.qam_order < 4 || side * side != self.qam_order || !side.is_power_of_two() {
            return fail(format!(
                "qam_order must be a square power of two >= 4, got {}",
                self.qam_order
            ));
        }
        let baseline = self.rx_x.hypot(self.rx_y);
        if !(baseline > 0.0) {
            return fail("Rx must not coincide with the Tx".into());
        }
        if !(self.d_bis_min > baseline && self.d_bis_max >= self.d_bis_min) {
            return fail(format!(
                "need baseline {baseline} < d_Bis_min <= d_Bis_max, got [{}, {}]",
                self.d_bis_min, self.d_bis_max
            ));
        }
        if !(self.theta_r_min > 0.0
            && self.theta_r_max < 180.0
            && self.theta_r_min <= self.theta_r_max)
        {
            return fail("theta_r range must lie inside (0, 180)".into());
        }
        if !(self.v_t_min <= self.v_t_max) || !self.v_t_min.is_finite() || !self.v_t_max.is_finite()
        {
            return fail("v_t_min must not exceed v_t_max".into());
        }
        let v_max = self.wavelength() / (2.0 * self.symbol_duration);
        if self.v_t_min.abs().max(self.v_t_max.abs()) >= v_max {
            return fail(format!(
                "target velocities reach the Doppler ambiguity {v_max} m/s"
            ));
        }
        Ok(())
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_hz
    }

    pub fn tx_power_w(&self) -> f64 {
        dbm_to_watts(self.tx_power_dbm)
    }

    pub fn noise_power_w(&self) -> f64 {
        dbm_to_watts(self.noise_power_dbm)
    }

    pub fn layout(&self) -> Result<NodeLayout> {
        NodeLayout::new(Point::new(self.rx_x, self.rx_y))
    }

    pub fn grid(&self) -> super::SpaceTimeGrid {
        super::SpaceTimeGrid {
            symbols: self.symbols,
            antennas: self.rx_antennas,
            symbol_duration: self.symbol_duration,
        }
    }

    /// Largest unambiguous |bistatic velocity|, `λ/(2T_s)`.
    pub fn max_velocity(&self) -> f64 {
        self.wavelength() / (2.0 * self.symbol_duration)
    }

    /// Width of one range-profile bin, `c/(Δf·N_A)`.
    pub fn range_bin_width(&self) -> f64 {
        SPEED_OF_LIGHT / (self.subcarrier_spacing_hz * self.range_fft_size as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        let cfg = ScenarioConfig::default();
        cfg.validate().unwrap();
        assert!((cfg.wavelength() - 0.010707).abs() < 1e-6);
        assert!((cfg.range_bin_width() - 2.4397).abs() < 1e-4);
        assert!((cfg.max_velocity() - 600.2).abs() < 0.5);
        assert!((cfg.noise_power_w() - 1e-11).abs() < 1e-24);
    }

    #[test]
    fn parses_flat_keys() {
        let cfg = ScenarioConfig::from_toml_str(
            "P_Tx = 25.0\nM_s = 8\nN_cl = 2\nsigma_AS = 0.0\naoa_strategy = \"rank_reduction\"\n",
        )
        .unwrap();
        assert_eq!(cfg.symbols, 8);
        assert_eq!(cfg.clutter_rays, 2);
        assert_eq!(cfg.tx_power_dbm, 25.0);
        assert_eq!(cfg.aoa_strategy, AoaStrategy::RankReduction);
        assert_eq!(cfg.subcarriers, 792);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(ScenarioConfig::from_toml_str("K = 2000").is_err());
        assert!(ScenarioConfig::from_toml_str("N_cl = 0").is_err());
        assert!(ScenarioConfig::from_toml_str("T_s = 1e-6").is_err());
        assert!(ScenarioConfig::from_toml_str("qam_order = 8").is_err());
        assert!(ScenarioConfig::from_toml_str("d_Bis_min = 10.0").is_err());
        assert!(ScenarioConfig::from_toml_str("unknown_key = 1").is_err());
        assert!(ScenarioConfig::from_toml_str("N_A = 1000").is_err());
    }
}
