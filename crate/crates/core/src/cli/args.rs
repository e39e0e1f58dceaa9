//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::attack_sim::Adversary;

use super::sweep::Figure;

#[derive(Debug, Parser)]
#[command(
    name = "fanobound",
    version,
    about = "Fano-type bounds on reconstruction advantage under differential privacy"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print every applicable advantage bound as JSON.
    Bound(BoundArgs),
    /// Simulate the reconstruction game and print one CSV row.
    Simulate(SimulateArgs),
    /// Sweep one parameter and write CSV.
    Sweep(SweepArgs),
    /// Write a figure preset's CSV files.
    Figures(FiguresArgs),
}

/// Where the information budget comes from.
#[derive(Debug, Clone, Args)]
pub struct SourceArgs {
    /// Randomized response with keep-parameter q, as `q=<f>`.
    #[arg(long, value_name = "q=<f>", value_parser = parse_q)]
    pub rr: Option<f64>,

    /// Gaussian mechanism; combine with --encodings, --onehot or --delta, and --sigma.
    #[arg(long)]
    pub gaussian: bool,

    /// Headerless CSV with one encoding per row.
    #[arg(long, value_name = "CSV", conflicts_with = "onehot")]
    pub encodings: Option<PathBuf>,

    /// Use the M one-hot vectors as encodings.
    #[arg(long, value_name = "M", value_parser = parse_size)]
    pub onehot: Option<usize>,

    /// L2 sensitivity, when no encodings are given.
    #[arg(long, conflicts_with_all = ["encodings", "onehot"])]
    pub delta: Option<f64>,

    /// Gaussian noise standard deviation.
    #[arg(long)]
    pub sigma: Option<f64>,

    /// A mutual-information bound in nats.
    #[arg(long, value_name = "NATS")]
    pub mi: Option<f64>,

    /// Linear RDP curve epsilon(alpha) = slope * alpha, as `slope=<f>`.
    #[arg(long = "rdp-linear", value_name = "slope=<f>", value_parser = parse_slope)]
    pub rdp_linear: Option<f64>,

    /// DP-SGD without amplification, as `T=<int> sigma=<f> [C=<f>]`.
    #[arg(long, num_args = 1..=3, value_name = "KEY=VALUE")]
    pub dpsgd: Option<Vec<String>>,
}

#[derive(Debug, Clone, Args)]
pub struct PriorArgs {
    /// Number of candidates (accepts forms such as 1e10).
    #[arg(long = "M", value_name = "M", value_parser = parse_size)]
    pub m: Option<usize>,

    /// Uniform prior over the M candidates (the default).
    #[arg(long, conflicts_with = "prior")]
    pub uniform: bool,

    /// JSON file holding an array of M probabilities.
    #[arg(long, value_name = "JSON")]
    pub prior: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    /// Comma-separated orders for the generalized Fano bound.
    #[arg(long = "alpha-grid", value_delimiter = ',', value_name = "LIST")]
    pub alpha_grid: Option<Vec<f64>>,

    /// Monte-Carlo samples for the mutual-information estimate.
    #[arg(long = "mc-samples", default_value_t = crate::mi_bounds::DEFAULT_MC_SAMPLES)]
    pub mc_samples: usize,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub prior: PriorArgs,
    #[command(flatten)]
    pub eval: EvalArgs,

    /// Restrict to these bounds (comma-separated).
    #[arg(long, value_delimiter = ',')]
    pub bounds: Option<Vec<String>>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub prior: PriorArgs,
    #[command(flatten)]
    pub eval: EvalArgs,

    #[arg(long, default_value_t = super::sweep::DEFAULT_TRIALS)]
    pub trials: u64,

    #[arg(long, default_value = "map", value_parser = parse_adversary)]
    pub adversary: Adversary,

    /// Also fill these bound columns (comma-separated).
    #[arg(long, value_delimiter = ',')]
    pub bounds: Option<Vec<String>>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Swept parameter: q (randomized response), sigma (Gaussian) or epsilon (linear RDP).
    #[arg(long, value_parser = ["q", "sigma", "epsilon"])]
    pub param: String,

    /// Comma-separated ascending values.
    #[arg(long, value_delimiter = ',', required = true)]
    pub grid: Vec<f64>,

    /// Encodings for a sigma sweep.
    #[arg(long, value_name = "CSV", conflicts_with = "onehot")]
    pub encodings: Option<PathBuf>,

    /// One-hot encodings for a sigma sweep.
    #[arg(long, value_name = "M", value_parser = parse_size)]
    pub onehot: Option<usize>,

    #[command(flatten)]
    pub prior: PriorArgs,
    #[command(flatten)]
    pub eval: EvalArgs,

    /// Bound columns to fill (comma-separated); defaults to all that apply.
    #[arg(long, value_delimiter = ',')]
    pub bounds: Option<Vec<String>>,

    /// Attack trials per grid point; 0 disables simulation.
    #[arg(long, default_value_t = super::sweep::DEFAULT_TRIALS)]
    pub trials: u64,

    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FiguresArgs {
    /// Preset name: fig2, fig3a or fig3b.
    #[arg(value_parser = parse_figure)]
    pub name: Figure,

    #[arg(long = "out-dir", default_value = ".")]
    pub out_dir: PathBuf,

    #[arg(long, default_value_t = super::sweep::DEFAULT_TRIALS)]
    pub trials: u64,

    #[arg(long, default_value_t = super::sweep::DEFAULT_FIGURE_SEED)]
    pub seed: u64,

    #[arg(long = "mc-samples", default_value_t = crate::mi_bounds::DEFAULT_MC_SAMPLES)]
    pub mc_samples: usize,
}

/// Splits `key=value` and parses the value.
pub fn parse_kv(s: &str, key: &str) -> Result<f64, String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected {key}=<value>, got {s:?}"))?;
    if !k.trim().eq_ignore_ascii_case(key) {
        return Err(format!("expected key {key:?}, got {k:?}"));
    }
    v.trim()
        .parse::<f64>()
        .map_err(|_| format!("{key}: {v:?} is not a number"))
}

fn parse_q(s: &str) -> Result<f64, String> {
    parse_kv(s, "q")
}

fn parse_slope(s: &str) -> Result<f64, String> {
    parse_kv(s, "slope")
}

/// Parses a candidate count, accepting scientific notation for exact integers.
pub fn parse_size(s: &str) -> Result<usize, String> {
    if let Ok(n) = s.parse::<usize>() {
        return Ok(n);
    }
    let v: f64 = s.parse().map_err(|_| format!("{s:?} is not a count"))?;
    if v.fract() != 0.0 || v < 0.0 || v >= usize::MAX as f64 {
        return Err(format!("{s:?} is not a whole count"));
    }
    Ok(v as usize)
}

fn parse_adversary(s: &str) -> Result<Adversary, String> {
    s.parse().map_err(|e: crate::Error| e.to_string())
}

fn parse_figure(s: &str) -> Result<Figure, String> {
    s.parse().map_err(|e: crate::Error| e.to_string())
}

/// DP-SGD parameters from `T=`, `sigma=` and optional `C=` tokens.
pub fn parse_dpsgd(tokens: &[String]) -> Result<(u64, f64, f64), String> {
    let (mut steps, mut sigma, mut clip) = (None, None, None);
    for tok in tokens {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| format!("expected KEY=VALUE, got {tok:?}"))?;
        match k {
            "T" => {
                steps = Some(
                    v.parse::<u64>()
                        .map_err(|_| format!("T: {v:?} is not a step count"))?,
                )
            }
            "sigma" => sigma = Some(parse_kv(tok, "sigma")?),
            "C" => clip = Some(parse_kv(tok, "C")?),
            other => return Err(format!("unknown --dpsgd key {other:?}")),
        }
    }
    Ok((
        steps.ok_or("--dpsgd needs T=<int>")?,
        sigma.ok_or("--dpsgd needs sigma=<f>")?,
        clip.unwrap_or(1.0),
    ))
}
