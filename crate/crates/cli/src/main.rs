//! `eqobs` — run equivariant observer simulations, verify the algebraic
//! laws they rely on, and sweep gains.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use eqobs_core::sim::{emit_outputs, run_scenario, summarize, Integrator, ScenarioConfig};
use eqobs_core::verify::run_suite;
use eqobs_core::{by_name, Gains};

#[derive(Parser)]
#[command(
    name = "eqobs",
    version,
    about = "Equivariant observer simulation for second-order kinematics on matrix Lie groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum IntegratorArg {
    Euler,
    Exp,
}

impl From<IntegratorArg> for Integrator {
    fn from(value: IntegratorArg) -> Self {
        match value {
            IntegratorArg::Euler => Integrator::Euler,
            IntegratorArg::Exp => Integrator::Exp,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write trajectory.csv, trajectory.svg,
    /// lyapunov.svg, and summary.json.
    Run {
        /// Scenario config (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Output directory (created if missing).
        #[arg(long)]
        out: PathBuf,
        /// Override the integrator from the config.
        #[arg(long)]
        integrator: Option<IntegratorArg>,
    },
    /// Check the group axioms, action laws, equivariance, and lift
    /// identities on random samples; nonzero exit on any failure.
    Verify {
        /// Group name (se2, so3, se3) or path to a descriptor JSON.
        #[arg(long)]
        group: String,
        /// Number of random samples.
        #[arg(long, default_value_t = 1000)]
        cases: usize,
        /// RNG seed.
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Run the scenario once per (k1, k2) pair and write a comparison
    /// summary. Pairs run in parallel.
    Sweep {
        /// Scenario config (JSON); its gains are replaced per run.
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated k1 values.
        #[arg(long)]
        k1: String,
        /// Comma-separated k2 values.
        #[arg(long)]
        k2: String,
        /// Output directory; each pair gets a subdirectory.
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            config,
            out,
            integrator,
        } => run_command(&config, &out, integrator),
        Command::Verify { group, cases, seed } => verify_command(&group, cases, seed),
        Command::Sweep {
            config,
            k1,
            k2,
            out,
        } => sweep_command(&config, &k1, &k2, &out),
    }
}

fn load_config(path: &Path) -> Result<ScenarioConfig> {
    ScenarioConfig::from_json_file(path)
        .with_context(|| format!("loading scenario config {}", path.display()))
}

fn run_command(config: &Path, out: &Path, integrator: Option<IntegratorArg>) -> Result<()> {
    let mut cfg = load_config(config)?;
    if let Some(integrator) = integrator {
        cfg.integrator = integrator.into();
    }
    let records = run_scenario(&cfg).context("running scenario")?;
    let paths = emit_outputs(&cfg, &records, out).context("writing outputs")?;
    let summary = summarize(&cfg, &records);
    println!("{}", serde_json::to_string_pretty(&summary)?);
    eprintln!(
        "wrote {}, {}, {}, {}",
        paths.trajectory_csv.display(),
        paths.trajectory_svg.display(),
        paths.lyapunov_svg.display(),
        paths.summary_json.display()
    );
    Ok(())
}

fn verify_command(group: &str, cases: usize, seed: u64) -> Result<()> {
    let desc = by_name(group)?;
    let report = run_suite(&desc, cases, seed)?;
    println!("{report}");
    if !report.passed() {
        std::process::exit(1);
    }
    Ok(())
}

/// One row of sweep_summary.json.
#[derive(Serialize)]
struct SweepEntry {
    k1: f64,
    k2: f64,
    /// Stable FNV-1a hash of the per-run config JSON; keys the run.
    config_hash: String,
    dir: String,
    lyapunov_initial: f64,
    lyapunov_final: f64,
    lyapunov_ratio: f64,
    log10_lyapunov_slope: f64,
    err_pose_final: f64,
    err_offset_final: f64,
}

fn parse_list(name: &str, spec: &str) -> Result<Vec<f64>> {
    let values: Vec<f64> = spec
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .with_context(|| format!("invalid {name} value {s:?}"))
        })
        .collect::<Result<_>>()?;
    if values.is_empty() {
        bail!("{name} list is empty");
    }
    Ok(values)
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

fn sweep_command(config: &Path, k1_spec: &str, k2_spec: &str, out: &Path) -> Result<()> {
    use rayon::prelude::*;

    let base = load_config(config)?;
    let k1s = parse_list("k1", k1_spec)?;
    let k2s = parse_list("k2", k2_spec)?;
    std::fs::create_dir_all(out)?;

    let mut combos: Vec<(f64, f64)> = Vec::new();
    for &k1 in &k1s {
        for &k2 in &k2s {
            combos.push((k1, k2));
        }
    }

    let mut entries: Vec<SweepEntry> = combos
        .par_iter()
        .map(|&(k1, k2)| -> Result<SweepEntry> {
            let mut cfg = base.clone();
            cfg.gains =
                Gains::new(k1, k2).with_context(|| format!("invalid gains k1={k1}, k2={k2}"))?;
            let config_json = serde_json::to_string(&cfg)?;
            let config_hash = format!("{:016x}", fnv1a64(config_json.as_bytes()));
            let dir_name = format!("k1_{k1}_k2_{k2}");
            let dir = out.join(&dir_name);
            let records = run_scenario(&cfg)
                .with_context(|| format!("running sweep point k1={k1}, k2={k2}"))?;
            emit_outputs(&cfg, &records, &dir)?;
            let summary = summarize(&cfg, &records);
            Ok(SweepEntry {
                k1,
                k2,
                config_hash,
                dir: dir_name,
                lyapunov_initial: summary.lyapunov_initial,
                lyapunov_final: summary.lyapunov_final,
                lyapunov_ratio: summary.lyapunov_ratio,
                log10_lyapunov_slope: summary.log10_lyapunov_slope,
                err_pose_final: summary.err_pose_final,
                err_offset_final: summary.err_offset_final,
            })
        })
        .collect::<Result<_>>()?;

    entries.sort_by(|a, b| (a.k1, a.k2).partial_cmp(&(b.k1, b.k2)).unwrap());
    let summary_path = out.join("sweep_summary.json");
    std::fs::write(&summary_path, serde_json::to_string_pretty(&entries)?)?;
    println!("{}", serde_json::to_string_pretty(&entries)?);
    eprintln!("wrote {}", summary_path.display());
    Ok(())
}
