//! `workmeter`: reproducible runs of the work-measurement simulations.
//!
//! Every command writes its data files plus `manifest.json` into `--out`.
//! Re-running with `--config <out>/manifest.json` reproduces the data files byte for byte.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or parameter values (exit 2).
    Usage(String),
    /// A checked threshold was not met (exit 1).
    Threshold(String),
    /// Reading or writing files (exit 3).
    Io(String),
    /// Any other failure inside a computation (exit 1).
    Failed(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            Self::Threshold(_) | Self::Failed(_) => 1,
            Self::Usage(_) => 2,
            Self::Io(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Usage(m) => write!(f, "usage error: {m}"),
            Self::Threshold(m) => write!(f, "threshold not met: {m}"),
            Self::Io(m) => write!(f, "i/o error: {m}"),
            Self::Failed(m) => write!(f, "failed: {m}"),
        }
    }
}

impl From<workmeter_core::Error> for CliError {
    fn from(e: workmeter_core::Error) -> Self {
        use workmeter_core::Error as E;
        match e {
            E::InvalidParameter(_) | E::InvalidBeta(_) | E::IndexOutOfRange { .. } => Self::Usage(e.to_string()),
            E::BoundViolation(_) => Self::Threshold(e.to_string()),
            _ => Self::Failed(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "workmeter", version, about = "Work measured on a control device: fluctuation-theorem checks and figure data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug)]
pub struct Common {
    /// Output directory (created if missing).
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// key=value file or a previous manifest.json; explicit flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check the two-point-measurement Jarzynski identity on random instances.
    #[command(args_override_self = true)]
    Tpm {
        #[command(flatten)]
        args: TpmArgs,
        #[command(flatten)]
        common: Common,
    },
    /// ΔF, ΔF̃ and ⟨W⟩ over a log grid of switching times.
    #[command(args_override_self = true)]
    Figure1 {
        #[command(flatten)]
        args: Figure1Args,
        #[command(flatten)]
        common: Common,
    },
    /// Random-coupling study of optimized versus linear protocols.
    #[command(args_override_self = true)]
    Optimize {
        #[command(flatten)]
        args: OptimizeArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Per-collision work read off the ancillas for a qubit protocol.
    #[command(args_override_self = true)]
    WorkTrace {
        #[command(flatten)]
        args: WorkTraceArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Truncated-Fock oscillator work against the closed form.
    #[command(args_override_self = true)]
    OscillatorCheck {
        #[command(flatten)]
        args: OscillatorArgs,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct TpmArgs {
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SystemKind {
    Qubit,
    Oscillator,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct Figure1Args {
    #[arg(long, value_enum, default_value = "qubit")]
    pub system: SystemKind,
    /// Qubit coupling variant (1 or 2).
    #[arg(long, default_value_t = 1)]
    pub variant: u8,
    /// Oscillator protocol (1–4).
    #[arg(long, default_value_t = 1)]
    pub protocol: u8,
    #[arg(long, default_value_t = 0.05)]
    pub t_min: f64,
    #[arg(long, default_value_t = 50.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 40)]
    pub points: usize,
    /// Collisions per effective unitary (qubit only).
    #[arg(long, default_value_t = 40_000)]
    pub steps: usize,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    #[arg(long, default_value_t = 1.0)]
    pub g: f64,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sampling {
    Rescaled,
    Bounded,
}

/// Unset options take the value of the chosen strategy preset.
#[derive(Args, Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct OptimizeArgs {
    /// 1: T ∈ [0.5, 5] with 5 spline points; 2: T ∈ [0.5, 20] with 10.
    #[arg(long, default_value_t = 1)]
    pub strategy: u8,
    #[arg(long, value_delimiter = ',')]
    pub dims: Option<Vec<usize>>,
    /// Random couplings per dimension.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub t_min: Option<f64>,
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub steps_search: Option<usize>,
    #[arg(long)]
    pub steps_final: Option<usize>,
    #[arg(long)]
    pub baseline_duration: Option<f64>,
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long)]
    pub min_step: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub fd_step: Option<f64>,
    #[arg(long)]
    pub duration_grid: Option<usize>,
    #[arg(long, value_enum)]
    pub sampling: Option<Sampling>,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TraceProtocol {
    /// The coupling's linear sweep.
    Linear,
    /// Hold the initial control state.
    Constant,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TraceMode {
    Expectation,
    Sampled,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct WorkTraceArgs {
    #[arg(long, default_value_t = 1)]
    pub variant: u8,
    #[arg(long, value_enum, default_value = "linear")]
    pub protocol: TraceProtocol,
    #[arg(long, default_value_t = 50.0)]
    pub duration: f64,
    #[arg(long, default_value_t = 40_000)]
    pub steps: usize,
    /// Inverse temperature of the initial thermal state.
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, value_enum, default_value = "expectation")]
    pub mode: TraceMode,
    #[arg(long, default_value_t = 100_000)]
    pub shots: u64,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct OscillatorArgs {
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
    pub protocols: Vec<u8>,
    #[arg(long, value_delimiter = ',', default_value = "2,6.283185307179586,10")]
    pub durations: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0,1,2,3")]
    pub n0: Vec<usize>,
    #[arg(long, default_value_t = 40)]
    pub levels: usize,
    #[arg(long, default_value_t = 10_000)]
    pub steps: usize,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    #[arg(long, default_value_t = 1.0)]
    pub g: f64,
    /// Largest accepted |numeric − closed form|.
    #[arg(long, default_value_t = 1e-4)]
    pub tolerance: f64,
}

fn run() -> Result<(), CliError> {
    let args = config::expand_args(std::env::args().collect())?;
    let cli = Cli::try_parse_from(args).unwrap_or_else(|e| e.exit());
    match cli.command {
        Command::Tpm { args, common } => commands::tpm(args, &common),
        Command::Figure1 { args, common } => commands::figure1(args, &common),
        Command::Optimize { args, common } => commands::optimize(args, &common),
        Command::WorkTrace { args, common } => commands::work_trace(args, &common),
        Command::OscillatorCheck { args, common } => commands::oscillator_check(args, &common),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("workmeter: {e}");
            ExitCode::from(e.code())
        }
    }
}
