use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "projdyn", version, about = "Experiments with matrix semigroups acting on projective space and the torus")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Command {
    /// Check unbounded orbits, strong irreducibility and proximality.
    Hypotheses(HypothesesArgs),
    /// Dominant directions of proximal words.
    Limitset(LimitsetArgs),
    /// Log-moduli of dominant eigenvalues, with an aperiodicity gap.
    Spectrum(SpectrumArgs),
    /// Random walk statistics on the circle extension of projective space.
    Walk(WalkArgs),
    /// Orbit of a point on the torus.
    Torus(TorusArgs),
    /// Rescaled snapshot of a vector orbit in one norm shell.
    Shell(ShellArgs),
    /// Re-run the experiment recorded in a manifest.
    #[serde(skip)]
    Replay(ReplayArgs),
}

/// Flags shared by every experiment. Neither the output directory nor the
/// thread count is recorded in the manifest: neither changes any result.
#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct Common {
    /// Generator file.
    #[arg(long)]
    pub gens: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "out")]
    #[serde(skip, default = "default_out")]
    pub out: PathBuf,
    /// Worker threads (0: one per core).
    #[arg(long, default_value_t = 0)]
    #[serde(skip)]
    pub threads: usize,
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct HypothesesArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Word length searched for proximal elements and invariant lines.
    #[arg(long, default_value_t = 6)]
    pub max_len: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Growth trials for unbounded orbits.
    #[arg(long, default_value_t = 16)]
    pub trials: usize,
    /// Steps per growth trial.
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct LimitsetArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 10)]
    pub max_len: usize,
    /// Gap tolerance for proximality.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Points closer than this are merged.
    #[arg(long, default_value_t = 1e-6)]
    pub dedup: f64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SpectrumArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 8)]
    pub max_len: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Coefficient bound for the aperiodicity gap of the generators.
    #[arg(long, default_value_t = 500)]
    pub coeff_bound: u32,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct WalkArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Chain length, burn-in included.
    #[arg(long, default_value_t = 101_000)]
    pub steps: usize,
    #[arg(long, default_value_t = 1000)]
    pub burn_in: usize,
    /// Trials for contraction and growth statistics.
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    /// Homothety ratio of the circle extension.
    #[arg(long, default_value_t = 2.0)]
    pub c: f64,
    /// Comma-separated letter probabilities (default: uniform).
    #[arg(long)]
    pub weights: Option<String>,
    /// Word length of the limit set used for distance statistics.
    #[arg(long, default_value_t = 8)]
    pub max_len: usize,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct TorusArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Comma-separated coordinates: `p/q` fractions are handled exactly,
    /// anything else (decimals, `sqrt(N)±K`) in fixed point.
    #[arg(long, allow_hyphen_values = true)]
    pub point: String,
    /// Treat the point as inexact even if every coordinate is a fraction.
    #[arg(long)]
    pub float: bool,
    #[arg(long, default_value_t = 12)]
    pub max_len: usize,
    #[arg(long, default_value_t = 50)]
    pub grid: u32,
    /// Points processed before the search is cut off.
    #[arg(long, default_value_t = 1 << 24)]
    pub budget: u64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ShellArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 2.0)]
    pub c: f64,
    /// Shell index: norms in `[c^t, c^(t+1))`.
    #[arg(long, allow_hyphen_values = true, default_value_t = 4)]
    pub t: i32,
    /// Comma-separated starting vector (default: first basis vector).
    #[arg(long, allow_hyphen_values = true)]
    pub vector: Option<String>,
    /// Word length of the orbit.
    #[arg(long, default_value_t = 14)]
    pub max_len: usize,
    /// Word length of the limit set compared against.
    #[arg(long, default_value_t = 10)]
    pub limit_len: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub dedup: f64,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ReplayArgs {
    /// Manifest written by an earlier run.
    pub manifest: PathBuf,
    /// Output directory (default: the manifest's directory).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
}

impl Command {
    pub fn common(&self) -> Option<&Common> {
        match self {
            Command::Hypotheses(a) => Some(&a.common),
            Command::Limitset(a) => Some(&a.common),
            Command::Spectrum(a) => Some(&a.common),
            Command::Walk(a) => Some(&a.common),
            Command::Torus(a) => Some(&a.common),
            Command::Shell(a) => Some(&a.common),
            Command::Replay(_) => None,
        }
    }

    pub fn common_mut(&mut self) -> Option<&mut Common> {
        match self {
            Command::Hypotheses(a) => Some(&mut a.common),
            Command::Limitset(a) => Some(&mut a.common),
            Command::Spectrum(a) => Some(&mut a.common),
            Command::Walk(a) => Some(&mut a.common),
            Command::Torus(a) => Some(&mut a.common),
            Command::Shell(a) => Some(&mut a.common),
            Command::Replay(_) => None,
        }
    }
}
