//! Command-line front end for the `pairgan` binary.

mod commands;
pub mod output;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::toy_games::UpdateOrder;
use crate::verify::Poison;
use output::Format;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0} verification check(s) failed")]
    Verify(usize),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => EXIT_CONFIG,
            Self::Io { .. } => EXIT_IO,
            Self::Verify(_) => EXIT_VERIFY,
        }
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        Self::Config(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "pairgan", version, about = "Finite-space experiments with pairwise discriminators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dirac toy games: trajectories and vector fields.
    Dirac(DiracArgs),
    /// Alternating descent against a rank-one-updated operator.
    PairganZ(PairganZArgs),
    /// Three (or more) point masses aligned by a unary or pairwise discriminator.
    Multi(MultiArgs),
    /// Sufficiency report for a generator/operator pair.
    Sufficiency(SufficiencyArgs),
    /// Run the property suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Args, serde::Serialize)]
pub struct OutputArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args, serde::Serialize)]
pub struct DynamicsArgs {
    #[arg(long, default_value_t = 2000)]
    pub steps: usize,
    #[arg(long, default_value_t = 0.1)]
    pub lr_gen: f64,
    #[arg(long, default_value_t = 0.1)]
    pub lr_disc: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DiracChoice {
    Sgan,
    Pairgan,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MultiChoice {
    Unary,
    Pairwise,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderArg {
    DiscFirst,
    GenFirst,
    Simultaneous,
}

impl From<OrderArg> for UpdateOrder {
    fn from(o: OrderArg) -> Self {
        match o {
            OrderArg::DiscFirst => UpdateOrder::DiscriminatorFirst,
            OrderArg::GenFirst => UpdateOrder::GeneratorFirst,
            OrderArg::Simultaneous => UpdateOrder::Simultaneous,
        }
    }
}

#[derive(Debug, Args, serde::Serialize)]
pub struct DiracArgs {
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(flatten)]
    pub dynamics: DynamicsArgs,
    #[arg(long, value_enum, default_value_t = DiracChoice::Both)]
    pub game: DiracChoice,
    #[arg(long, default_value_t = 2.0)]
    pub gamma: f64,
    #[arg(long, default_value_t = 1.5, allow_negative_numbers = true)]
    pub x0: f64,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub psi0: f64,
    #[arg(long, value_enum, default_value_t = OrderArg::DiscFirst)]
    pub order: OrderArg,
    /// Skip the vector-field grid.
    #[arg(long)]
    pub no_field: bool,
    #[arg(long, default_value_t = -2.0, allow_negative_numbers = true)]
    pub grid_min: f64,
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    pub grid_max: f64,
    #[arg(long, default_value_t = 41)]
    pub resolution: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialOperator {
    Identity,
    NegIdentity,
    Zeros,
    RandomPd,
    RandomSymmetric,
}

#[derive(Debug, Args, serde::Serialize)]
pub struct PairganZArgs {
    #[command(flatten)]
    pub output: OutputArgs,
    /// `--lr-gen` is α, `--lr-disc` is β.
    #[command(flatten)]
    pub dynamics: DynamicsArgs,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    /// Target density as a comma list; random from the seed if absent.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub p: Option<Vec<f64>>,
    /// Initial density; random from the seed if absent.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub q0: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value_t = InitialOperator::Identity)]
    pub a0: InitialOperator,
    #[arg(long, value_enum, default_value_t = OrderArg::GenFirst)]
    pub order: OrderArg,
    /// Independent runs with per-run seeds derived from `--seed`.
    #[arg(long, default_value_t = 1)]
    pub runs: usize,
    /// Record the full operator each step.
    #[arg(long)]
    pub snapshots: bool,
}

#[derive(Debug, Args, serde::Serialize)]
pub struct MultiArgs {
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(flatten)]
    pub dynamics: DynamicsArgs,
    #[arg(long, value_enum, default_value_t = MultiChoice::Both)]
    pub game: MultiChoice,
    #[arg(long, default_value_t = 2.0)]
    pub gamma: f64,
    /// Initial point locations.
    #[arg(long, value_delimiter = ',', default_value = "0.5,0.5,-1.0", allow_negative_numbers = true)]
    pub points: Vec<f64>,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub psi0: f64,
    /// Standard deviation of the seeded unary initialization.
    #[arg(long, default_value_t = 0.5)]
    pub unary_scale: f64,
    #[arg(long, value_enum, default_value_t = OrderArg::DiscFirst)]
    pub order: OrderArg,
}

#[derive(Debug, Args, serde::Serialize)]
pub struct SufficiencyArgs {
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long, default_value = "softmax")]
    pub generator: String,
    #[arg(long, default_value = "rbf")]
    pub operator: String,
    #[arg(long, default_value_t = 4)]
    pub k: usize,
    /// Target density; random with full support if absent.
    #[arg(long, value_delimiter = ',')]
    pub p: Option<Vec<f64>>,
    #[arg(long, default_value_t = 1.0)]
    pub bandwidth: f64,
    /// Step size for the rate analysis; 1/μ_max if absent.
    #[arg(long)]
    pub step: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PoisonArg {
    Hessian,
}

impl From<PoisonArg> for Poison {
    fn from(p: PoisonArg) -> Self {
        match p {
            PoisonArg::Hessian => Poison::Hessian,
        }
    }
}

#[derive(Debug, Args, serde::Serialize)]
pub struct VerifyArgs {
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Seeds as a list or inclusive range, e.g. `0,1,2` or `0..2`.
    #[arg(long, default_value = "0..2", value_parser = parse_list)]
    pub seeds: IntList,
    /// Space sizes, e.g. `2..8`.
    #[arg(long, default_value = "2..8", value_parser = parse_list)]
    pub sizes: IntList,
    #[arg(long, value_enum)]
    pub poison: Option<PoisonArg>,
}

/// Integers given as `a..b` (inclusive) or a comma list.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
#[serde(transparent)]
pub struct IntList(pub Vec<u64>);

pub fn parse_list(s: &str) -> Result<IntList, String> {
    parse_ints(s).map(IntList)
}

fn parse_ints(s: &str) -> Result<Vec<u64>, String> {
    let s = s.trim();
    if let Some((lo, hi)) = s.split_once("..") {
        let hi = hi.strip_prefix('=').unwrap_or(hi);
        let lo: u64 = lo.trim().parse().map_err(|e| format!("bad range start `{lo}`: {e}"))?;
        let hi: u64 = hi.trim().parse().map_err(|e| format!("bad range end `{hi}`: {e}"))?;
        if lo > hi {
            return Err(format!("empty range {lo}..{hi}"));
        }
        return Ok((lo..=hi).collect());
    }
    let items: Result<Vec<u64>, String> = s
        .split(',')
        .map(|t| t.trim().parse().map_err(|e| format!("bad integer `{t}`: {e}")))
        .collect();
    let items = items?;
    if items.is_empty() {
        return Err("empty list".into());
    }
    Ok(items)
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match commands::dispatch(&cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
