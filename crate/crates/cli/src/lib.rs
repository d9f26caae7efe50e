//! Command-line front end: experiment configs in, CSV/JSON artifacts out.

pub mod config;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};

use spde_lab_core::error_lab::{
    bound_constants, estimate_errors, sharpness_ratios, LambdaSequence, RunOptions,
};
use spde_lab_core::integrator::{simulate_levels, StepperConfig};
use spde_lab_core::noise::{generate_increments, NoisePlan, TimeGrid};
use spde_lab_core::LabError;

pub use config::ExperimentConfig;

pub const SEED_ENV: &str = "SPDE_LAB_SEED";
pub const DEMO_CONFIG: &str = include_str!("../configs/wave_additive.toml");

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("budget refused: {0}")]
    Budget(String),
    #[error("{0}")]
    Lab(#[from] LabError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) | Self::Lab(LabError::Config { .. } | LabError::DivergentTail(_)) => 2,
            Self::Budget(_) => 3,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "spde-lab", version, about = "Noise-truncation error experiments for stochastic evolution equations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the config seed (which overrides SPDE_LAB_SEED).
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Terminal states of path 0 at every level.
    Simulate(RunArgs),
    /// Coupled strong/weak errors, bounds and the rate fit.
    Rates(RunArgs),
    /// Gaussian functional oracle for `lambda_k = (k + 1)^{-q}`.
    Oracle {
        #[arg(long)]
        q: f64,
        #[arg(long, value_delimiter = ',')]
        levels: Vec<usize>,
    },
    /// Error constants and tail bounds for a config.
    Bounds {
        #[arg(long)]
        config: PathBuf,
    },
    /// Rates run of the bundled additive wave config.
    Demo {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

#[derive(Debug, Serialize)]
pub struct Provenance {
    pub version: &'static str,
    pub seed: u64,
    pub config_sha256: String,
    /// Resolved config; running it reproduces the artifacts.
    pub config: String,
}

fn e(v: f64) -> String {
    format!("{v:.16e}")
}

/// Flag, then config, then environment, then 0.
pub fn resolve_seed(flag: Option<u64>, config: Option<u64>) -> Result<u64, CliError> {
    if let Some(s) = flag.or(config) {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("{SEED_ENV} must be an unsigned integer, got `{v}`"))),
        Err(_) => Ok(0),
    }
}

fn read_config(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|err| CliError::Config(format!("cannot read {}: {err}", path.display())))
}

fn resolve(text: &str, seed: Option<u64>) -> Result<(ExperimentConfig, String), CliError> {
    let mut cfg = ExperimentConfig::parse(text)?;
    cfg.experiment.seed = Some(resolve_seed(seed, cfg.experiment.seed)?);
    let resolved = cfg.to_toml();
    Ok((cfg, resolved))
}

fn check_budget(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let cost = cfg.cost();
    let budget = cfg.experiment.budget;
    if cost > budget {
        return Err(CliError::Budget(format!(
            "n_ref * steps * paths = {cost:.3e} exceeds the budget {budget:.3e}; \
             lower paths, steps or n_ref, or raise `budget` in [experiment]"
        )));
    }
    Ok(())
}

fn provenance(cfg: &ExperimentConfig, resolved: &str) -> Provenance {
    Provenance {
        version: env!("CARGO_PKG_VERSION"),
        seed: cfg.experiment.seed.unwrap_or(0),
        config_sha256: hex::encode(Sha256::digest(resolved.as_bytes())),
        config: resolved.to_string(),
    }
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("artifacts serialize");
    fs::write(path, text + "\n")?;
    Ok(())
}

fn plan_for(cfg: &ExperimentConfig, horizon: f64) -> Result<NoisePlan, CliError> {
    let e = &cfg.experiment;
    Ok(NoisePlan::new(
        e.n_ref,
        TimeGrid::uniform(horizon, e.steps)?,
        e.seed.unwrap_or(0),
        0,
    ))
}

/// Writes `report.csv`, `summary.json` and `provenance.json` into `out`.
pub fn run_rates(text: &str, seed: Option<u64>, workers: Option<usize>, out: &Path) -> Result<String, CliError> {
    let (cfg, resolved) = resolve(text, seed)?;
    check_budget(&cfg)?;
    let spec = cfg.build_spec()?;
    let plan = plan_for(&cfg, spec.horizon())?;
    let opts = RunOptions {
        workers,
        collocation_points: cfg.experiment.collocation_points,
    };
    let report = estimate_errors(
        &spec,
        &cfg.experiment.levels,
        cfg.experiment.paths,
        &cfg.functional(&spec),
        &plan,
        &opts,
    )?;
    fs::create_dir_all(out)?;
    let csv = report.to_csv();
    fs::write(out.join("report.csv"), &csv)?;
    let prov = provenance(&cfg, &resolved);
    let summary = serde_json::json!({
        "report": report.summary_json(),
        "provenance": &prov,
    });
    write_json(&out.join("summary.json"), &summary)?;
    write_json(&out.join("provenance.json"), &prov)?;
    Ok(csv)
}

/// Writes `terminal.csv` (level, coordinate, value) for path 0.
pub fn run_simulate(text: &str, seed: Option<u64>, out: &Path) -> Result<String, CliError> {
    let (cfg, resolved) = resolve(text, seed)?;
    check_budget(&cfg)?;
    let spec = cfg.build_spec()?;
    let plan = plan_for(&cfg, spec.horizon())?;
    let block = generate_increments(&plan);
    let stepper = StepperConfig {
        steps: cfg.experiment.steps,
        record_path: false,
        collocation_points: cfg.experiment.collocation_points,
    };
    let mut levels = cfg.experiment.levels.clone();
    levels.push(cfg.experiment.n_ref);
    let runs = simulate_levels(&spec, &block, &levels, &stepper)?;
    let mut csv = String::from("level,index,value\n");
    for (n, t) in levels.iter().zip(&runs) {
        for (i, v) in t.terminal().iter().enumerate() {
            let _ = writeln!(csv, "{n},{i},{}", e(*v));
        }
    }
    fs::create_dir_all(out)?;
    fs::write(out.join("terminal.csv"), &csv)?;
    write_json(&out.join("provenance.json"), &provenance(&cfg, &resolved))?;
    Ok(csv)
}

pub fn oracle_table(q: f64, levels: &[usize]) -> Result<String, CliError> {
    let lambdas = LambdaSequence::power_law(q)?;
    let rows = sharpness_ratios(&lambdas, levels, None)?;
    let mut out = String::from("n,phi_n,tail,weak_ratio\n");
    for r in rows {
        let ratio = r.weak_ratio.map_or("unavailable".into(), e);
        let _ = writeln!(out, "{},{},{},{ratio}", r.n, e(r.phi_n), e(r.tail));
    }
    Ok(out)
}

pub fn bounds_table(text: &str) -> Result<String, CliError> {
    let cfg = ExperimentConfig::parse(text)?;
    let spec = cfg.build_spec()?;
    let mut out = String::from("quantity,value\n");
    match spec.norm_inputs() {
        Some(x) => {
            let k = bound_constants(x, spec.horizon());
            for (name, v) in [("C1", k.c1), ("C2", k.c2), ("C3", k.c3), ("C4", k.c4), ("C", k.c), ("apriori", k.apriori)] {
                let _ = writeln!(out, "{name},{}", e(v));
            }
        }
        None => {
            for name in ["C1", "C2", "C3", "C4", "C", "apriori"] {
                let _ = writeln!(out, "{name},unavailable");
            }
        }
    }
    for &n in &cfg.experiment.levels {
        let _ = writeln!(out, "tail_bound({n}),{}", spec.tail_bound(n));
    }
    Ok(out)
}

pub fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate(a) => {
            run_simulate(&read_config(&a.config)?, a.seed, &a.out)?;
            println!("wrote {}", a.out.join("terminal.csv").display());
        }
        Command::Rates(a) => {
            print!("{}", run_rates(&read_config(&a.config)?, a.seed, a.workers, &a.out)?);
        }
        Command::Oracle { q, levels } => print!("{}", oracle_table(q, &levels)?),
        Command::Bounds { config } => print!("{}", bounds_table(&read_config(&config)?)?),
        Command::Demo { seed, workers, out } => {
            print!("{}", run_rates(DEMO_CONFIG, seed, workers, &out)?);
        }
    }
    Ok(())
}

pub fn main_with(cli: Cli) -> ExitCode {
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("spde-lab: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
