//! Command-line front end. Every command reads one TOML config, applies
//! flag overrides, writes CSV outputs plus a `<command>_manifest.json` into
//! the output directory, and maps failures to distinct exit codes.

mod commands;
mod config;
mod output;

pub use config::{DatasetConfig, PredictConfig, RunConfig, UqConfig};

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::data::DataError;
use crate::gpr::GprError;
use crate::hybrid::HybridError;
use crate::physics::PhysicsError;
use crate::uq::UqError;

#[derive(Debug, Parser)]
#[command(
    name = "fohybrid",
    version,
    about = "Hybrid physics + GP forward-osmosis flux model"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML run configuration; built-in defaults when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Model file to write (fit) or read (other commands).
    #[arg(long, global = true)]
    pub model: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Overrides every seed in the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Monte Carlo samples per point.
    #[arg(long, global = true)]
    pub n_samples: Option<usize>,
    /// CSV of operating points (features only).
    #[arg(long, global = true)]
    pub points: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Generate a synthetic dataset.
    Generate,
    /// Fit the hybrid model on the training split.
    Fit,
    /// Predict flux with uncertainty at a set of points.
    Predict,
    /// Compare physics-only, pure-GP and hybrid models on train and test.
    Evaluate,
    /// Compare Delta-method and Monte Carlo input uncertainty.
    ValidateUq,
    /// Mean absolute Jacobian per feature and variance decomposition.
    Sensitivity,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Generate => "generate",
            Command::Fit => "fit",
            Command::Predict => "predict",
            Command::Evaluate => "evaluate",
            Command::ValidateUq => "validate-uq",
            Command::Sensitivity => "sensitivity",
        }
    }
}

/// Process exit codes.
pub mod exit_code {
    pub const OK: i32 = 0;
    pub const IO: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const DATA: i32 = 3;
    pub const SOLVER: i32 = 4;
    pub const CONDITIONING: i32 = 5;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("solver error: {0}")]
    Solver(String),
    #[error("conditioning error: {0}")]
    Conditioning(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    /// Prefixes the message, keeping the category.
    pub fn with_context(self, ctx: &str) -> Self {
        match self {
            CliError::Config(m) => CliError::Config(format!("{ctx}: {m}")),
            CliError::Data(m) => CliError::Data(format!("{ctx}: {m}")),
            CliError::Solver(m) => CliError::Solver(format!("{ctx}: {m}")),
            CliError::Conditioning(m) => CliError::Conditioning(format!("{ctx}: {m}")),
            CliError::Io(m) => CliError::Io(format!("{ctx}: {m}")),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => exit_code::IO,
            CliError::Config(_) => exit_code::CONFIG,
            CliError::Data(_) => exit_code::DATA,
            CliError::Solver(_) => exit_code::SOLVER,
            CliError::Conditioning(_) => exit_code::CONDITIONING,
        }
    }
}

impl From<DataError> for CliError {
    fn from(e: DataError) -> Self {
        match e {
            DataError::Config(_) => CliError::Config(e.to_string()),
            DataError::Io { .. } => CliError::Io(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<PhysicsError> for CliError {
    fn from(e: PhysicsError) -> Self {
        match e {
            PhysicsError::Config(_) | PhysicsError::UnknownCorrelation(_) => {
                CliError::Config(e.to_string())
            }
            _ => CliError::Solver(e.to_string()),
        }
    }
}

impl From<GprError> for CliError {
    fn from(e: GprError) -> Self {
        match e {
            GprError::Conditioning { .. } | GprError::Optimization(_) => {
                CliError::Conditioning(e.to_string())
            }
            GprError::Domain(_) | GprError::Dimension(_) => CliError::Data(e.to_string()),
        }
    }
}

impl From<HybridError> for CliError {
    fn from(e: HybridError) -> Self {
        match e {
            HybridError::TrainingRow { .. } => CliError::Solver(e.to_string()),
            HybridError::Physics(p) => p.into(),
            HybridError::Data(d) => d.into(),
            HybridError::Gpr(g) => g.into(),
            HybridError::Io { .. } => CliError::Io(e.to_string()),
            HybridError::Checksum(_) | HybridError::Incompatible { .. } => {
                CliError::Data(e.to_string())
            }
            HybridError::Unknown(_) => CliError::Config(e.to_string()),
        }
    }
}

impl From<UqError> for CliError {
    fn from(e: UqError) -> Self {
        match e {
            UqError::Model(h) => h.into(),
            UqError::Config(_) | UqError::Correlation(_) | UqError::Sampling { .. } => {
                CliError::Config(e.to_string())
            }
            UqError::Domain(_) => CliError::Data(e.to_string()),
            UqError::Jacobian { .. } | UqError::MonteCarlo { .. } => {
                CliError::Solver(e.to_string())
            }
        }
    }
}

/// Resolves the effective config (flags > file > defaults).
pub fn effective_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = Some(s);
    }
    cfg.resolve_seeds();
    if let Some(o) = &cli.out {
        cfg.output_dir = o.clone();
    }
    if let Some(m) = &cli.model {
        cfg.model = Some(m.clone());
    }
    if let Some(n) = cli.n_samples {
        cfg.uq.n_samples = n;
    }
    if let Some(p) = &cli.points {
        cfg.predict.points = Some(p.clone());
    }
    Ok(cfg)
}

/// Runs one command; returns the paths written.
pub fn run(cli: &Cli) -> Result<Vec<PathBuf>, CliError> {
    let cfg = effective_config(cli)?;
    match cli.command {
        Command::Generate => commands::generate(&cfg),
        Command::Fit => commands::fit(&cfg),
        Command::Predict => commands::predict(&cfg),
        Command::Evaluate => commands::evaluate(&cfg),
        Command::ValidateUq => commands::validate_uq(&cfg),
        Command::Sensitivity => commands::sensitivity(&cfg),
    }
}
