//! Seeded Monte Carlo trials and parameter sweeps.

mod sweep;
mod trial;
pub mod validate;

pub use sweep::{
    aggregate, parse_metrics_csv, read_metrics_csv, rmse_aggregate, run_sweep, run_sweep_records,
    write_metrics_csv, MetricsRecord, COLUMNS,
};
pub use trial::{
    draw_truth, measurement, run_trial, Stream, TargetEstimate, TrialOutcome, TrialSeed,
    MAX_DRAW_ATTEMPTS,
};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scene::ScenarioConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Proposed,
    BacksubIdeal,
    BacksubPerturbed,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Proposed => "proposed",
            Method::BacksubIdeal => "backsub_ideal",
            Method::BacksubPerturbed => "backsub_perturbed",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepAxis {
    #[serde(rename = "P_Tx_dBm")]
    TxPowerDbm,
    #[serde(rename = "M_s")]
    Symbols,
    #[serde(rename = "N_cl")]
    ClutterRays,
    #[serde(rename = "sigma_AS")]
    AngularSpread,
    #[serde(rename = "alpha_RCS_t")]
    TargetRcs,
    #[serde(rename = "delta_theta")]
    DeltaTheta,
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::TxPowerDbm => "P_Tx_dBm",
            SweepAxis::Symbols => "M_s",
            SweepAxis::ClutterRays => "N_cl",
            SweepAxis::AngularSpread => "sigma_AS",
            SweepAxis::TargetRcs => "alpha_RCS_t",
            SweepAxis::DeltaTheta => "delta_theta",
        }
    }

    fn is_count(&self) -> bool {
        matches!(self, SweepAxis::Symbols | SweepAxis::ClutterRays)
    }

    /// Config and perturbation offset for one axis value.
    pub fn apply(
        &self,
        base: &ScenarioConfig,
        delta_theta: f64,
        value: f64,
    ) -> Result<(ScenarioConfig, f64)> {
        let mut cfg = base.clone();
        let mut dt = delta_theta;
        match self {
            SweepAxis::TxPowerDbm => cfg.tx_power_dbm = value,
            SweepAxis::Symbols => cfg.symbols = value as usize,
            SweepAxis::ClutterRays => cfg.clutter_rays = value as usize,
            SweepAxis::AngularSpread => cfg.angular_spread_deg = value,
            SweepAxis::TargetRcs => cfg.target_rcs = value,
            SweepAxis::DeltaTheta => dt = value,
        }
        cfg.validate()?;
        Ok((cfg, dt))
    }
}

fn default_trials() -> usize {
    1000
}

fn default_methods() -> Vec<Method> {
    vec![Method::Proposed]
}

fn default_delta_theta() -> f64 {
    5.0
}

/// The `[sweep]` section of a sweep file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    /// Master seed; the scenario seed when absent.
    #[serde(default)]
    pub seed: Option<u64>,
    /// AoA offset of the perturbing scatterer, degrees.
    #[serde(default = "default_delta_theta", rename = "delta_theta")]
    pub delta_theta_deg: f64,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::Config("sweep values must be nonempty".into()));
        }
        if self.trials == 0 {
            return Err(Error::Config("sweep trials must be >= 1".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("sweep methods must be nonempty".into()));
        }
        if let Some(v) = self.values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Config(format!("sweep value {v} is not finite")));
        }
        if self.axis.is_count() {
            if let Some(v) = self.values.iter().find(|v| v.fract() != 0.0 || **v < 1.0) {
                return Err(Error::Config(format!(
                    "{} values must be positive integers, got {v}",
                    self.axis.name()
                )));
            }
        }
        if !self.delta_theta_deg.is_finite() {
            return Err(Error::Config("delta_theta must be finite".into()));
        }
        Ok(())
    }

    pub fn master_seed(&self, cfg: &ScenarioConfig) -> u64 {
        self.seed.unwrap_or(cfg.seed)
    }
}

/// Parses a sweep file: flat scenario keys plus a `[sweep]` table.
pub fn parse_sweep_file(text: &str) -> Result<(ScenarioConfig, SweepSpec)> {
    let mut table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
    let sweep = table
        .remove("sweep")
        .ok_or_else(|| Error::Config("missing [sweep] section".into()))?;
    let spec: SweepSpec = sweep
        .try_into()
        .map_err(|e: toml::de::Error| Error::Config(format!("[sweep]: {e}")))?;
    let cfg: ScenarioConfig = toml::Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
    cfg.validate()?;
    spec.validate()?;
    Ok((cfg, spec))
}
