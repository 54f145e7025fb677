//! Oracle and invariant suites shared by the `validate` command and the tests.

use rand::Rng;

use super::trial::{draw_truth, run_trial, Stream, TrialSeed};
use super::Method;
use crate::error::Result;
use crate::estimator::{
    covariance_of_columns, estimate_pairs, music2d_search, CovarianceDecomposition,
    EstimatorSettings, MusicSearch,
};
use crate::geometry::{invert_from_estimates, solve_from_position, NodeLayout, Point};
use crate::numerics::C64;
use crate::scene::{synthesize_echoes, AoaStrategy, Echo, ScenarioConfig};
use crate::SPEED_OF_LIGHT;

/// Worst-case errors over noiseless, clutter-free scenes.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CleanOracleReport {
    pub scenes: usize,
    pub missed: usize,
    pub max_aoa_err_deg: f64,
    pub max_vel_err: f64,
    pub max_range_err: f64,
}

impl CleanOracleReport {
    pub fn passes(&self) -> bool {
        self.missed == 0
            && self.max_aoa_err_deg < 0.01
            && self.max_vel_err < 0.01
            && self.max_range_err <= 2.44
    }
}

/// Proposed pipeline on `scenes` random truths with noise and clutter off.
pub fn clean_oracle(
    base: &ScenarioConfig,
    scenes: usize,
    master: u64,
) -> Result<CleanOracleReport> {
    let cfg = ScenarioConfig {
        noise: false,
        clutter_rcs: 0.0,
        ..base.clone()
    };
    let mut report = CleanOracleReport {
        scenes,
        ..Default::default()
    };
    for i in 0..scenes {
        let seed = TrialSeed::new(master, 0, i);
        let truth = draw_truth(&cfg, &mut seed.stream(Stream::Truth))?;
        let outcome = run_trial(&cfg, &truth, &[Method::Proposed], 0.0, &seed)?.remove(0);
        match outcome.errors(&truth) {
            Some((a, v, r)) => {
                report.max_aoa_err_deg = report.max_aoa_err_deg.max(a.abs());
                report.max_vel_err = report.max_vel_err.max(v.abs());
                report.max_range_err = report.max_range_err.max(r.abs());
            }
            None => report.missed += 1,
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EquivalenceReport {
    pub scenes: usize,
    pub failures: usize,
    pub max_theta_gap_deg: f64,
    pub max_fd_gap_hz: f64,
}

impl EquivalenceReport {
    pub fn passes(&self) -> bool {
        self.failures == 0 && self.max_theta_gap_deg <= 0.01 && self.max_fd_gap_hz <= 1.0
    }
}

/// Two random sources (broadside degrees, Hz) separated enough to resolve.
fn two_sources<R: Rng + ?Sized>(rng: &mut R) -> [(f64, f64); 2] {
    loop {
        let a = (rng.gen_range(-50.0..50.0), rng.gen_range(-4000.0..4000.0));
        let b = (rng.gen_range(-50.0..50.0), rng.gen_range(-4000.0..4000.0));
        if f64::abs(a.0 - b.0) > 8.0 {
            return [a, b];
        }
    }
}

/// rootMUSIC against the 2-D MUSIC grid search on noiseless two-source frames.
pub fn oracle_equivalence(
    base: &ScenarioConfig,
    scenes: usize,
    master: u64,
    strategy: AoaStrategy,
) -> Result<EquivalenceReport> {
    let cfg = ScenarioConfig {
        noise: false,
        aoa_strategy: strategy,
        ..base.clone()
    };
    let grid = cfg.grid();
    let lambda = cfg.wavelength();
    let settings = EstimatorSettings::from_config(&cfg);
    let search = MusicSearch {
        theta_min: -60.0,
        theta_max: 60.0,
        fd_min: -4500.0,
        fd_max: 4500.0,
        ..MusicSearch::default()
    };
    let mut report = EquivalenceReport {
        scenes,
        ..Default::default()
    };
    for i in 0..scenes {
        let seed = TrialSeed::new(master, 1, i);
        let mut rng = seed.stream(Stream::Truth);
        let sources = two_sources(&mut rng);
        let echoes: Vec<Echo> = sources
            .iter()
            .enumerate()
            .map(|(s, &(theta, fd))| Echo {
                aoa_deg: 90.0 - theta,
                aod_deg: 90.0,
                doppler_hz: fd,
                delay_s: (20.0 + 7.0 * s as f64 + rng.gen_range(0.0..5.0)) / SPEED_OF_LIGHT,
                gain: C64::from_polar(1e-6, rng.gen_range(0.0..std::f64::consts::TAU)),
            })
            .collect();
        let frame = synthesize_echoes(
            &cfg,
            90.0,
            &echoes,
            &[],
            &mut seed.stream(Stream::Symbols),
            &mut seed.stream(Stream::Noise),
        )?;
        let r = covariance_of_columns(&frame.snapshots)?;
        let decomp = CovarianceDecomposition::with_sources(r, grid, 2)?;
        let roots = match estimate_pairs(&decomp, &settings) {
            Ok(p) => p,
            Err(_) => {
                report.failures += 1;
                continue;
            }
        };
        let peaks = music2d_search(&decomp.noise_subspace(), 2, &grid, &search)?;
        if peaks.len() < 2 {
            report.failures += 1;
            continue;
        }
        for pair in &roots {
            let fd = pair.velocity / lambda;
            let nearest = peaks
                .iter()
                .min_by(|a, b| {
                    (a.0 - pair.theta_deg)
                        .abs()
                        .total_cmp(&(b.0 - pair.theta_deg).abs())
                })
                .expect("two peaks");
            report.max_theta_gap_deg = report
                .max_theta_gap_deg
                .max((nearest.0 - pair.theta_deg).abs());
            report.max_fd_gap_hz = report.max_fd_gap_hz.max((nearest.1 - fd).abs());
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GeometryReport {
    pub triangles: usize,
    pub max_ratio_residual: f64,
    pub max_cosine_residual: f64,
    pub max_round_trip_m: f64,
}

impl GeometryReport {
    pub fn passes(&self) -> bool {
        self.max_ratio_residual <= 1e-6
            && self.max_cosine_residual <= 1e-6
            && self.max_round_trip_m <= 1e-9
    }
}

/// Bistatic triangle identities and forward/inverse round trip on random targets.
pub fn geometry_identities(triangles: usize, master: u64) -> Result<GeometryReport> {
    let mut rng = TrialSeed::new(master, 2, 0).stream(Stream::Truth);
    let mut report = GeometryReport {
        triangles,
        ..Default::default()
    };
    let mut done = 0;
    while done < triangles {
        let layout = NodeLayout::new(Point::new(rng.gen_range(5.0..40.0), 0.0))?;
        let target = Point::new(rng.gen_range(-30.0..70.0), rng.gen_range(0.5..60.0));
        let Ok(sol) = solve_from_position(target, &layout) else {
            continue;
        };
        let back = invert_from_estimates(sol.theta_r, sol.d_bis, &layout)?;
        report.max_ratio_residual = report.max_ratio_residual.max(sol.ratio_identity_residual());
        report.max_cosine_residual = report
            .max_cosine_residual
            .max(sol.law_of_cosines_residual());
        report.max_round_trip_m = report.max_round_trip_m.max((back.d_rx - sol.d_rx).abs());
        done += 1;
    }
    Ok(report)
}
