//! `sldgm`: build Construction-D lattices from nested binary codes, inspect
//! them, decode received vectors and run error-rate campaigns.

mod commands;
mod input;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

#[derive(Parser)]
#[command(name = "sldgm", version, about = "Construction-D lattices from nested binary codes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Grow a Tanner graph with progressive edge growth and write it as alist.
    Peg(PegArgs),
    /// Build a lattice from generator files and write it as JSON.
    Build(BuildArgs),
    /// Print per-coordinate structure, label groups and the dual basis.
    Info(LatticeArgs),
    /// Check determinant, inverse and distance/gain bounds; exit 1 on failure.
    Verify(LatticeArgs),
    /// Decode one received vector with the multistage min-sum decoder.
    Decode(DecodeArgs),
    /// Run an AWGN block error rate campaign.
    Simulate(SimulateArgs),
    /// Repeat a run recorded in a manifest.
    Rerun(RerunArgs),
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct PegArgs {
    #[arg(long)]
    pub symbols: usize,
    #[arg(long)]
    pub checks: usize,
    /// Degree of every symbol node.
    #[arg(long)]
    pub degree: usize,
    /// Tie-breaking seed; drawn from the clock and recorded when omitted.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct BuildArgs {
    /// Generator of C_1, optionally followed by C_2 (dense 0/1 rows or alist).
    #[arg(long, num_args = 1..=2, required_unless_present = "ldgm", conflicts_with = "ldgm")]
    #[serde(default)]
    pub codes: Vec<PathBuf>,
    /// Tanner graph (alist, checks x symbols) of a systematic LDGM code used as C_1.
    #[arg(long)]
    pub ldgm: Option<PathBuf>,
    /// Further levels given as prefixes of C_1's generator, e.g. `--prefix 64`.
    #[arg(long, value_delimiter = ',')]
    #[serde(default)]
    pub prefix: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    pub alpha: u8,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Clone, Debug)]
pub struct LatticeArgs {
    #[arg(long)]
    pub lattice: PathBuf,
}

#[derive(Args, Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DecoderFlags {
    /// Iteration cap per level.
    #[arg(long = "max-iter", default_value_t = 10)]
    pub max_iter: usize,
    /// Normalization factor of check messages (1.0 is plain min-sum).
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    #[arg(long, default_value_t = 100.0)]
    pub clip: f64,
    /// Always run the full iteration cap.
    #[arg(long)]
    pub no_early_stop: bool,
}

#[derive(Args, Clone, Debug)]
pub struct DecodeArgs {
    #[arg(long)]
    pub lattice: PathBuf,
    /// Received vector, one real per line.
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub decoder: DecoderFlags,
}

#[derive(Args, Clone, Debug)]
pub struct SimulateArgs {
    /// Campaign JSON; command-line flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub lattice: Option<PathBuf>,
    /// SNR points in dB: `1,2,3`, `0..6` or `0:0.5:3`.
    #[arg(long)]
    pub snr: Option<String>,
    /// Trials per point, e.g. `100000` or `1e5`.
    #[arg(long, value_parser = input::parse_count)]
    pub trials: Option<u64>,
    /// Stop a point after this many errors (trials becomes the cap).
    #[arg(long = "target-errors", value_parser = input::parse_count)]
    pub target_errors: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long = "max-iter")]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub scale: Option<f64>,
    #[arg(long)]
    pub clip: Option<f64>,
    /// Worker threads (0 = all cores).
    #[arg(long)]
    pub workers: Option<usize>,
    /// CSV output.
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the plain-text table here.
    #[arg(long)]
    pub table: Option<PathBuf>,
}

#[derive(Args, Clone, Debug)]
pub struct RerunArgs {
    pub manifest: PathBuf,
    /// Where to write the primary output of the repeated run.
    #[arg(long)]
    pub out: PathBuf,
    /// Worker threads for simulate runs.
    #[arg(long)]
    pub workers: Option<usize>,
}

/// Failure classes, mapped to exit codes.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags, unreadable or malformed inputs: exit 2.
    Usage(anyhow::Error),
    /// A checked identity does not hold: exit 1.
    Verification(String),
    /// Any other runtime failure: exit 1.
    Runtime(anyhow::Error),
}

impl From<sldgm::Error> for Failure {
    fn from(e: sldgm::Error) -> Self {
        match e {
            sldgm::Error::InvalidArgument(_)
            | sldgm::Error::InvalidFamily { .. }
            | sldgm::Error::Parse { .. }
            | sldgm::Error::Io(_)
            | sldgm::Error::Json(_) => Failure::Usage(e.into()),
            _ => Failure::Runtime(e.into()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

pub type CmdResult<T = ()> = std::result::Result<T, Failure>;

pub fn usage(msg: impl std::fmt::Display) -> Failure {
    Failure::Usage(anyhow::anyhow!("{msg}"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Peg(a) => commands::peg(&a),
        Command::Build(a) => commands::build(&a),
        Command::Info(a) => commands::info(&a),
        Command::Verify(a) => commands::verify(&a),
        Command::Decode(a) => commands::decode(&a),
        Command::Simulate(a) => commands::simulate(&a),
        Command::Rerun(a) => commands::rerun(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
