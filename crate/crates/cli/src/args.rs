//! Command-line flags. Every flag that a config file can also set is an
//! `Option` so that flags can override the file.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(
    name = "fastcur",
    version,
    about = "Sublinear CUR approximation and pivot-free elimination experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run an approximation algorithm over a batch of seeds.
    Approx(ApproxArgs),
    /// Run GENP, block elimination or preprocessed GENP over a batch of seeds.
    Genp(GenpArgs),
    /// Render reports as an SVG plot.
    Plot(PlotArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Twostage,
    Adaptive,
    Cross,
    Preprocessed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GenpMode {
    Genp,
    Block,
    Preprocessed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutFormat {
    Csv,
    Json,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlotKind {
    #[value(name = "error_vs_k")]
    ErrorVsK,
    #[value(name = "flops_vs_n")]
    FlopsVsN,
    #[value(name = "success_vs_b")]
    SuccessVsB,
}

#[derive(Debug, Clone, Default, Args)]
pub struct InputArgs {
    /// Generator shorthand, e.g. `average:200x200:r5:noise1e-10`.
    #[arg(long = "gen", value_name = "SPEC", conflicts_with = "input")]
    pub generator: Option<String>,
    /// MatrixMarket file.
    #[arg(long = "in", value_name = "PATH")]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct OutputArgs {
    /// Seeds: `N`, `A..B` (inclusive), or `A,B,C`.
    #[arg(long)]
    pub seeds: Option<String>,
    #[arg(long, value_enum)]
    pub out: Option<OutFormat>,
    /// Output directory; defaults to $FASTCUR_OUT_DIR, then `.`.
    #[arg(long, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
    /// Base name of the output files.
    #[arg(long)]
    pub name: Option<String>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ApproxArgs {
    /// JSON config; flags override its fields.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum)]
    pub alg: Option<Algorithm>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub l: Option<usize>,
    #[arg(long)]
    pub r: Option<usize>,
    /// Columns sampled by the error estimate.
    #[arg(long)]
    pub probe: Option<usize>,
    /// Relative cutoff of the truncated pseudo-inverse.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Target sampled relative error (adaptive).
    #[arg(long)]
    pub target: Option<f64>,
    #[arg(long)]
    pub max_level: Option<usize>,
    /// Maxvol dominance slack (cross).
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub max_sweeps: Option<usize>,
    /// Left multiplier: `gaussian`, `identity`, `bidiagB` or `bidiagBp`.
    #[arg(long, value_name = "MULT")]
    pub left: Option<String>,
    /// Right multiplier, same forms as --left.
    #[arg(long, value_name = "MULT")]
    pub right: Option<String>,
    /// Skip the O(mn) exact relative error.
    #[arg(long)]
    pub no_exact: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GenpArgs {
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum)]
    pub mode: Option<GenpMode>,
    #[arg(long)]
    pub block: Option<usize>,
    #[arg(long, value_name = "MULT")]
    pub left: Option<String>,
    #[arg(long, value_name = "MULT")]
    pub right: Option<String>,
    #[arg(long)]
    pub pivot_tol: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct PlotArgs {
    /// Reports written by `approx` (`.json` or `.csv`).
    pub reports: PathBuf,
    #[arg(long, value_enum)]
    pub kind: PlotKind,
    /// Output SVG path.
    #[arg(long)]
    pub out: PathBuf,
    /// Success threshold on the relative error (success_vs_b).
    #[arg(long, default_value_t = 1e-6)]
    pub threshold: f64,
}
