use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::trial::{draw_truth, run_trial, Stream, TrialOutcome, TrialSeed};
use super::{Method, SweepSpec};
use crate::error::{Error, Result};
use crate::scene::{GroundTruth, ScenarioConfig};
use crate::stfilter::ScnrParts;

/// CSV header, in order.
pub const COLUMNS: [&str; 9] = [
    "axis_name",
    "axis_value",
    "method",
    "scnr_db",
    "rmse_aoa_deg",
    "rmse_vel_mps",
    "rmse_range_m",
    "detection_rate",
    "trials",
];

/// `√(mean e²)`, `None` for no samples.
pub fn rmse_aggregate(errors: &[f64]) -> Option<f64> {
    if errors.is_empty() {
        return None;
    }
    Some((errors.iter().map(|e| e * e).sum::<f64>() / errors.len() as f64).sqrt())
}

/// One CSV row. Empty optional cells mean undefined (no detections).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub axis_name: String,
    pub axis_value: f64,
    pub method: Method,
    pub scnr_db: Option<f64>,
    pub rmse_aoa_deg: Option<f64>,
    pub rmse_vel_mps: Option<f64>,
    pub rmse_range_m: Option<f64>,
    pub detection_rate: f64,
    pub trials: usize,
}

impl MetricsRecord {
    fn check(&self) -> Result<()> {
        let bad = |v: Option<f64>| v.is_some_and(|x| !(x >= 0.0) || x.is_infinite());
        if bad(self.rmse_aoa_deg) || bad(self.rmse_vel_mps) || bad(self.rmse_range_m) {
            return Err(Error::Config("RMSE cells must be finite and >= 0".into()));
        }
        if !(0.0..=1.0).contains(&self.detection_rate) {
            return Err(Error::Config("detection_rate must lie in [0, 1]".into()));
        }
        if self.scnr_db.is_some_and(|s| s.is_nan()) || !self.axis_value.is_finite() {
            return Err(Error::Config(
                "scnr_db and axis_value must be numbers".into(),
            ));
        }
        Ok(())
    }
}

/// Pools one method's trials: SCNR numerators and denominators are summed
/// before the ratio, RMSEs run over detected trials only.
pub fn aggregate(
    axis_name: &str,
    axis_value: f64,
    method: Method,
    trials: &[(GroundTruth, TrialOutcome)],
) -> MetricsRecord {
    let mut parts = ScnrParts::default();
    let mut any_scnr = false;
    let (mut aoa, mut vel, mut range) = (Vec::new(), Vec::new(), Vec::new());
    for (truth, outcome) in trials {
        debug_assert_eq!(outcome.method, method);
        if let Some((a, v, r)) = outcome.errors(truth) {
            aoa.push(a);
            vel.push(v);
            range.push(r);
        }
        if let Some(p) = outcome.scnr {
            parts.accumulate(p);
            any_scnr = true;
        }
    }
    let detected = aoa.len();
    MetricsRecord {
        axis_name: axis_name.to_string(),
        axis_value,
        method,
        scnr_db: any_scnr.then(|| parts.db()),
        rmse_aoa_deg: rmse_aggregate(&aoa),
        rmse_vel_mps: rmse_aggregate(&vel),
        rmse_range_m: rmse_aggregate(&range),
        detection_rate: if trials.is_empty() {
            0.0
        } else {
            detected as f64 / trials.len() as f64
        },
        trials: trials.len(),
    }
}

fn sweep_points(base: &ScenarioConfig, spec: &SweepSpec) -> Result<Vec<(ScenarioConfig, f64)>> {
    spec.validate()?;
    spec.values
        .iter()
        .map(|&v| spec.axis.apply(base, spec.delta_theta_deg, v))
        .collect()
}

type TrialRecord = (GroundTruth, Vec<TrialOutcome>);

/// Runs the sweep in memory. Rows are ordered axis value outer, method inner.
pub fn run_sweep_records(
    base: &ScenarioConfig,
    spec: &SweepSpec,
    threads: Option<usize>,
) -> Result<Vec<MetricsRecord>> {
    let points = sweep_points(base, spec)?;
    let master = spec.master_seed(base);

    let work = || -> Result<Vec<Vec<TrialRecord>>> {
        points
            .iter()
            .enumerate()
            .map(|(axis_index, (cfg, delta_theta))| {
                (0..spec.trials)
                    .into_par_iter()
                    .map(|trial_index| {
                        let seed = TrialSeed::new(master, axis_index, trial_index);
                        let truth = draw_truth(cfg, &mut seed.stream(Stream::Truth))?;
                        let outcomes = run_trial(cfg, &truth, &spec.methods, *delta_theta, &seed)?;
                        Ok((truth, outcomes))
                    })
                    .collect()
            })
            .collect()
    };
    let results = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(work)?,
        None => work()?,
    };

    let mut rows = Vec::with_capacity(spec.values.len() * spec.methods.len());
    for (value, per_trial) in spec.values.iter().zip(&results) {
        for (m, &method) in spec.methods.iter().enumerate() {
            let column: Vec<(GroundTruth, TrialOutcome)> = per_trial
                .iter()
                .map(|(truth, outcomes)| (truth.clone(), outcomes[m].clone()))
                .collect();
            rows.push(aggregate(spec.axis.name(), *value, method, &column));
        }
    }
    Ok(rows)
}

/// Runs the sweep and writes the CSV. The output file is created before any
/// trial runs, so an unwritable path fails fast.
pub fn run_sweep(
    base: &ScenarioConfig,
    spec: &SweepSpec,
    out: &Path,
    threads: Option<usize>,
) -> Result<Vec<MetricsRecord>> {
    sweep_points(base, spec)?;
    let file = File::create(out).map_err(|source| Error::Io {
        path: out.to_path_buf(),
        source,
    })?;
    let rows = run_sweep_records(base, spec, threads)?;
    write_metrics_csv(file, &rows)?;
    Ok(rows)
}

pub fn write_metrics_csv<W: Write>(out: W, rows: &[MetricsRecord]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(COLUMNS)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|source| Error::Io {
        path: "<csv writer>".into(),
        source,
    })?;
    Ok(())
}

/// Parses and validates a metrics CSV with the sweep schema.
pub fn parse_metrics_csv<R: Read>(input: R) -> Result<Vec<MetricsRecord>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    if header.iter().ne(COLUMNS) {
        return Err(Error::Config(format!("unexpected CSV header {header:?}")));
    }
    let mut rows = Vec::new();
    for rec in r.deserialize() {
        let rec: MetricsRecord = rec?;
        rec.check()?;
        rows.push(rec);
    }
    Ok(rows)
}

pub fn read_metrics_csv(path: &Path) -> Result<Vec<MetricsRecord>> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_metrics_csv(file)
}
