use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use isac_clutter::harness::validate::{clean_oracle, geometry_identities, oracle_equivalence};
use isac_clutter::harness::{
    draw_truth, parse_sweep_file, run_sweep, run_trial, Method, Stream, TrialSeed,
};
use isac_clutter::scene::{AoaStrategy, ScenarioConfig};

#[derive(Parser)]
#[command(
    name = "isac-clutter",
    version,
    about = "Bistatic ISAC clutter-suppression simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario config (TOML). Sweep files carry a `[sweep]` table as well.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed, overriding the file.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// One trial of every method, dumped verbosely.
    Run {
        #[command(flatten)]
        common: Common,
        /// Trial index within the seed.
        #[arg(long, default_value_t = 0)]
        trial: usize,
        /// Perturber offset for the perturbed reference, degrees.
        #[arg(long, default_value_t = 5.0)]
        delta_theta: f64,
    },
    /// Sweep file to metrics CSV.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        out: PathBuf,
        /// Trials per point, overriding the file.
        #[arg(long)]
        trials: Option<usize>,
        /// Worker threads; all cores when absent.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Oracle and invariant suites.
    Validate {
        #[command(flatten)]
        common: Common,
        /// Scenes for the clean oracle.
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Scenes for the rootMUSIC/MUSIC equivalence check.
        #[arg(long, default_value_t = 50)]
        equivalence_scenes: usize,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_config(common: &Common) -> Result<ScenarioConfig> {
    let mut cfg = match &common.config {
        Some(path) => ScenarioConfig::from_toml_str(&read(path)?)
            .with_context(|| format!("parsing {}", path.display()))?,
        None => ScenarioConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn cmd_run(common: &Common, trial: usize, delta_theta: f64) -> Result<bool> {
    let cfg = load_config(common)?;
    let seed = TrialSeed::new(cfg.seed, 0, trial);
    let truth = draw_truth(&cfg, &mut seed.stream(Stream::Truth))?;
    println!("truth:");
    println!(
        "  theta_r = {:.4} deg, theta_t = {:.4} deg",
        truth.theta_r(),
        truth.theta_t()
    );
    println!(
        "  d_Bis = {:.4} m, v_t = {:.4} m/s",
        truth.d_bis(),
        truth.v_t
    );
    let methods = [
        Method::Proposed,
        Method::BacksubIdeal,
        Method::BacksubPerturbed,
    ];
    for outcome in run_trial(&cfg, &truth, &methods, delta_theta, &seed)? {
        println!("{}:", outcome.method);
        match (outcome.estimate, outcome.errors(&truth)) {
            (Some(e), Some((da, dv, dr))) => {
                println!("  sources = {}", e.sources);
                println!("  theta = {:.4} deg (err {:+.4})", e.theta_deg, da);
                println!("  v = {:.4} m/s (err {:+.4})", e.velocity, dv);
                println!("  d_Bis = {:.4} m (err {:+.4})", e.d_bis, dr);
            }
            _ => println!(
                "  missed: {}",
                outcome.failure.as_deref().unwrap_or("unknown")
            ),
        }
        if let Some(p) = outcome.scnr {
            println!("  SCNR = {:.2} dB", p.db());
        }
    }
    Ok(true)
}

fn cmd_sweep(
    common: &Common,
    out: &Path,
    trials: Option<usize>,
    threads: Option<usize>,
) -> Result<bool> {
    let Some(path) = &common.config else {
        bail!("sweep needs --config pointing at a sweep file");
    };
    let (cfg, mut spec) =
        parse_sweep_file(&read(path)?).with_context(|| format!("parsing {}", path.display()))?;
    if let Some(n) = trials {
        spec.trials = n;
    }
    if let Some(s) = common.seed {
        spec.seed = Some(s);
    }
    if threads == Some(0) {
        bail!("--threads must be >= 1");
    }
    let rows = run_sweep(&cfg, &spec, out, threads)?;
    eprintln!("wrote {} rows to {}", rows.len(), out.display());
    Ok(true)
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn cmd_validate(common: &Common, scenes: usize, equivalence_scenes: usize) -> Result<bool> {
    let cfg = load_config(common)?;
    let mut all = true;

    let clean = clean_oracle(&cfg, scenes, cfg.seed)?;
    all &= clean.passes();
    println!(
        "{} clean oracle: {} scenes, {} missed, max |dtheta| {:.2e} deg, |dv| {:.2e} m/s, |dd| {:.3} m",
        verdict(clean.passes()),
        clean.scenes,
        clean.missed,
        clean.max_aoa_err_deg,
        clean.max_vel_err,
        clean.max_range_err
    );

    for strategy in [AoaStrategy::Spatial, AoaStrategy::RankReduction] {
        let eq = oracle_equivalence(&cfg, equivalence_scenes, cfg.seed, strategy)?;
        all &= eq.passes();
        println!(
            "{} equivalence ({strategy:?}): {} scenes, {} failures, max gap {:.2e} deg, {:.3} Hz",
            verdict(eq.passes()),
            eq.scenes,
            eq.failures,
            eq.max_theta_gap_deg,
            eq.max_fd_gap_hz
        );
    }

    let geo = geometry_identities(10_000, cfg.seed)?;
    all &= geo.passes();
    println!(
        "{} geometry: {} triangles, ratio {:.1e}, cosine {:.1e}, round trip {:.1e} m",
        verdict(geo.passes()),
        geo.triangles,
        geo.max_ratio_residual,
        geo.max_cosine_residual,
        geo.max_round_trip_m
    );
    Ok(all)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run {
            common,
            trial,
            delta_theta,
        } => cmd_run(common, *trial, *delta_theta),
        Command::Sweep {
            common,
            out,
            trials,
            threads,
        } => cmd_sweep(common, out, *trials, *threads),
        Command::Validate {
            common,
            trials,
            equivalence_scenes,
        } => cmd_validate(common, *trials, *equivalence_scenes),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn sweep_flags_parse() {
        let cli = Cli::try_parse_from([
            "isac-clutter",
            "sweep",
            "--config",
            "s.toml",
            "--out",
            "o.csv",
            "--trials",
            "7",
            "--seed",
            "3",
        ])
        .unwrap();
        let Command::Sweep {
            common,
            out,
            trials,
            threads,
        } = cli.command
        else {
            panic!("wrong subcommand");
        };
        assert_eq!(common.seed, Some(3));
        assert_eq!(out, PathBuf::from("o.csv"));
        assert_eq!(trials, Some(7));
        assert_eq!(threads, None);
        assert!(Cli::try_parse_from(["isac-clutter", "sweep"]).is_err());
    }

    #[test]
    fn default_config_without_file() {
        let common = Common {
            config: None,
            seed: Some(99),
        };
        let cfg = load_config(&common).unwrap();
        assert_eq!(cfg.seed, 99);
    }
}
