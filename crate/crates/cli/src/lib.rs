//! Command-line front end: every subcommand reads one JSON config, runs the
//! experiment it describes and writes artifacts plus a manifest.

pub mod config;
pub mod experiments;
pub mod fit;
pub mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{ConfigError, ExperimentConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "ergm", version, about = "Sampling and diagnostics for exponential random graph models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Experiment config (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the base seed; the seed count is kept.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides `out_dir` from the config.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Worker threads for replicas (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fixed points and phase classification.
    Phase(Common),
    /// Classification over a grid of parameters.
    PhaseSweep(Common),
    /// Run the chain and record observables.
    Sample(Common),
    /// Coupling time from the extremal states.
    Couple(Common),
    /// Coupling times over several sizes and a scaling fit.
    MixScan(Common),
    /// Diagnostics.
    #[command(subcommand)]
    Diag(Diag),
    /// Exact enumeration for small n.
    #[command(subcommand)]
    Exact(Exact),
}

#[derive(Debug, Subcommand)]
pub enum Diag {
    BurnIn(Common),
    Independence(Common),
    Hysteresis(Common),
    Pseudo(Common),
}

#[derive(Debug, Subcommand)]
pub enum Exact {
    /// Exact distribution against chain samples.
    Compare(Common),
}

impl Command {
    fn parts(&self) -> (&'static str, &Common) {
        match self {
            Self::Phase(c) => ("phase", c),
            Self::PhaseSweep(c) => ("phase-sweep", c),
            Self::Sample(c) => ("sample", c),
            Self::Couple(c) => ("couple", c),
            Self::MixScan(c) => ("mix-scan", c),
            Self::Diag(Diag::BurnIn(c)) => ("diag burn-in", c),
            Self::Diag(Diag::Independence(c)) => ("diag independence", c),
            Self::Diag(Diag::Hysteresis(c)) => ("diag hysteresis", c),
            Self::Diag(Diag::Pseudo(c)) => ("diag pseudo", c),
            Self::Exact(Exact::Compare(c)) => ("exact compare", c),
        }
    }
}

/// Loads, checks and applies command-line overrides.
pub fn prepare(command: &Command) -> Result<(ExperimentConfig, PathBuf), ConfigError> {
    let (name, common) = command.parts();
    let mut cfg = ExperimentConfig::load(&common.config)?;
    if cfg.experiment.command() != name {
        return Err(ConfigError::Field {
            field: "experiment.kind".into(),
            message: format!("config describes `{}` but the subcommand is `{name}`", cfg.experiment.command()),
        });
    }
    if let Some(seed) = common.seed {
        cfg.seeds = cfg.seeds.with_base(seed);
    }
    let out = common
        .out_dir
        .clone()
        .or_else(|| cfg.out_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out").join(name.replace(' ', "-")));
    Ok((cfg, out))
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let (cfg, out) = match prepare(&cli.command) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("config error: {e}");
            return EXIT_CONFIG;
        }
    };
    if let Some(t) = cli.command.parts().1.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("warning: {e}");
        }
    }
    match experiments::run_experiment(&cfg, &out) {
        Ok(m) => {
            println!("wrote {} files to {}", m.files.len() + 1, out.display());
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_RUNTIME
        }
    }
}
