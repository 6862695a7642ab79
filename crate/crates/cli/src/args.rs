use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(name = "ulam", version, about = "Ulam networks and Google matrices of the dissipative typical map")]
pub struct Cli {
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true, value_parser = positive_usize)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Build an Ulam matrix and export it in the text format.
    Build(BuildArgs),
    /// In/out link histograms and power-law fits.
    Linkstats(LinkstatsArgs),
    /// PageRank vector by power iteration.
    Pagerank(PagerankArgs),
    /// PageRank PAR over damping factors and grid sizes.
    ScanAlpha(ScanAlphaArgs),
    /// PageRank PAR over kick strengths and grid sizes.
    ScanK(ScanKArgs),
    /// Full complex spectrum of G.
    Spectrum(SpectrumArgs),
    /// Slow-mode counts against N and the fitted Weyl exponent.
    Weyl(WeylArgs),
    /// Gaps 1 - |lambda| of the leading eigenvalues against N.
    Gap(GapArgs),
    /// Global contraction factor after one application of S.
    Contraction(ContractionArgs),
    /// y at period boundaries against k.
    Bifurcation(BifurcationArgs),
    /// Largest Lyapunov exponent of the map.
    Lyapunov(LyapunovArgs),
}

/// Map selection shared by all subcommands.
#[derive(Debug, Args, Serialize, Clone)]
pub struct MapArgs {
    /// Built-in phase set (t10, t20) or path to a phase-set config file.
    #[arg(long = "set", default_value = "t10")]
    pub set: String,
    /// Override the kick strength.
    #[arg(long, value_parser = nonnegative)]
    pub k: Option<f64>,
    /// Override the dissipation parameter, in (0, 1].
    #[arg(long, value_parser = eta_range)]
    pub eta: Option<f64>,
    /// Master seed for every random stream.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

/// Matrix construction shared by the network subcommands.
#[derive(Debug, Args, Serialize, Clone)]
pub struct NetArgs {
    #[command(flatten)]
    pub map: MapArgs,
    /// Cells per axis; N = grid^2.
    #[arg(long, default_value_t = 100, value_parser = positive_usize)]
    pub grid: usize,
    /// Trajectories per cell.
    #[arg(long = "nc", default_value_t = 10_000, value_parser = positive_usize)]
    pub n_c: usize,
    /// Read the matrix from this file instead of building it.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize, Clone)]
pub struct ScanNetArgs {
    #[command(flatten)]
    pub map: MapArgs,
    /// Comma-separated grid sides.
    #[arg(long = "grids", value_delimiter = ',', required = true, value_parser = positive_usize)]
    pub grids: Vec<usize>,
    #[arg(long = "nc", default_value_t = 10_000, value_parser = positive_usize)]
    pub n_c: usize,
}

#[derive(Debug, Args, Serialize, Clone)]
pub struct PowerArgs {
    /// L1 stopping tolerance of the power iteration.
    #[arg(long, default_value_t = 1e-12, value_parser = positive)]
    pub tol: f64,
    #[arg(long = "max-iter", default_value_t = 200_000, value_parser = positive_usize)]
    pub max_iter: usize,
    /// Keep the last iterate instead of failing when alpha < 1 does not converge.
    #[arg(long = "allow-unconverged")]
    pub allow_unconverged: bool,
}

#[derive(Debug, Args, Serialize, Clone)]
pub struct EigenArgs {
    /// Largest matrix (or diagonal block) that may be densified.
    #[arg(long = "dense-cap", default_value_t = ulam_core::spectrum::DEFAULT_DENSE_CAP, value_parser = positive_usize)]
    pub dense_cap: usize,
    /// Decompose the whole matrix at once even at alpha = 1.
    #[arg(long = "no-blocks")]
    pub no_blocks: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct BuildArgs {
    #[command(flatten)]
    pub net: NetArgs,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct LinkstatsArgs {
    #[command(flatten)]
    pub net: NetArgs,
    /// Fit range for in-degrees as `lo,hi` (default depends on the map).
    #[arg(long = "fit-in", value_delimiter = ',')]
    pub fit_in: Option<Vec<usize>>,
    /// Fit range for out-degrees as `lo,hi`.
    #[arg(long = "fit-out", value_delimiter = ',')]
    pub fit_out: Option<Vec<usize>>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct PagerankArgs {
    #[command(flatten)]
    pub net: NetArgs,
    #[arg(long, default_value_t = 0.85, value_parser = unit_interval)]
    pub alpha: f64,
    #[command(flatten)]
    pub power: PowerArgs,
    /// Also fit the rank decay over ranks `lo,hi`.
    #[arg(long = "fit-range", value_delimiter = ',')]
    pub fit_range: Option<Vec<usize>>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ScanAlphaArgs {
    #[command(flatten)]
    pub net: ScanNetArgs,
    /// Comma-separated damping factors.
    #[arg(long, value_delimiter = ',', required = true, value_parser = unit_interval)]
    pub alphas: Vec<f64>,
    #[command(flatten)]
    pub power: PowerArgs,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ScanKArgs {
    #[command(flatten)]
    pub net: ScanNetArgs,
    /// Comma-separated kick strengths.
    #[arg(long = "k-values", value_delimiter = ',', required = true, value_parser = nonnegative)]
    pub k_values: Vec<f64>,
    #[arg(long, default_value_t = 0.99, value_parser = unit_interval)]
    pub alpha: f64,
    #[command(flatten)]
    pub power: PowerArgs,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub net: NetArgs,
    #[arg(long, default_value_t = 1.0, value_parser = unit_interval)]
    pub alpha: f64,
    #[command(flatten)]
    pub eigen: EigenArgs,
    /// Skip eigenvectors (no PAR or residual columns).
    #[arg(long = "no-vectors")]
    pub no_vectors: bool,
    /// Decay-rate cut of the density histogram.
    #[arg(long = "gamma-cut", default_value_t = 6.0, value_parser = positive)]
    pub gamma_cut: f64,
    #[arg(long, default_value_t = 60, value_parser = positive_usize)]
    pub bins: usize,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct WeylArgs {
    #[command(flatten)]
    pub net: ScanNetArgs,
    #[arg(long, default_value_t = 1.0, value_parser = unit_interval)]
    pub alpha: f64,
    /// Decay-rate cutoff gamma_b.
    #[arg(long = "gamma-b", default_value_t = 6.0, value_parser = positive)]
    pub gamma_b: f64,
    #[command(flatten)]
    pub eigen: EigenArgs,
    /// Periods of the Lyapunov run (at eta = 1) behind nu_theory; 0 skips it.
    #[arg(long = "lyapunov-periods", default_value_t = 1_000_000)]
    pub lyapunov_periods: usize,
    /// Use this entropy per iteration for nu_theory instead of measuring it.
    #[arg(long, value_parser = positive, conflicts_with = "lyapunov_periods")]
    pub h: Option<f64>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct GapArgs {
    #[command(flatten)]
    pub net: ScanNetArgs,
    #[arg(long, default_value_t = 1.0, value_parser = unit_interval)]
    pub alpha: f64,
    /// Leading eigenvalues reported per size.
    #[arg(long, default_value_t = 10, value_parser = positive_usize)]
    pub top: usize,
    #[command(flatten)]
    pub eigen: EigenArgs,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ContractionArgs {
    #[command(flatten)]
    pub net: NetArgs,
    /// Comma-separated thresholds in (0, 1).
    #[arg(long, value_delimiter = ',', default_value = "0.0001,0.001,0.01,0.1", value_parser = open_unit_interval)]
    pub q: Vec<f64>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct BifurcationArgs {
    #[command(flatten)]
    pub map: MapArgs,
    /// Comma-separated kick strengths.
    #[arg(long = "k-values", value_delimiter = ',', required = true, value_parser = nonnegative)]
    pub k_values: Vec<f64>,
    #[arg(long = "n-traj", default_value_t = 10, value_parser = positive_usize)]
    pub n_traj: usize,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct LyapunovArgs {
    #[command(flatten)]
    pub map: MapArgs,
    /// Averaged map periods.
    #[arg(long, default_value_t = 1_000_000, value_parser = positive_usize)]
    pub periods: usize,
    /// Discarded initial periods.
    #[arg(long, default_value_t = 1_000)]
    pub transient: usize,
    /// Allowed drift of the running estimate over the last 10%.
    #[arg(long = "drift-tol", default_value_t = 5e-3, value_parser = positive)]
    pub drift_tol: f64,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

fn number(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|e| format!("`{s}` is not a number: {e}"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

fn unit_interval(s: &str) -> Result<f64, String> {
    let v = number(s)?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("{v} is outside the valid range [0,1]"))
    }
}

fn open_unit_interval(s: &str) -> Result<f64, String> {
    let v = number(s)?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("{v} is outside the valid range (0,1)"))
    }
}

fn eta_range(s: &str) -> Result<f64, String> {
    let v = number(s)?;
    if v > 0.0 && v <= 1.0 {
        Ok(v)
    } else {
        Err(format!("{v} is outside the valid range (0,1]"))
    }
}

fn nonnegative(s: &str) -> Result<f64, String> {
    let v = number(s)?;
    if v >= 0.0 {
        Ok(v)
    } else {
        Err(format!("{v} must be nonnegative"))
    }
}

fn positive(s: &str) -> Result<f64, String> {
    let v = number(s)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("{v} must be positive"))
    }
}

fn positive_usize(s: &str) -> Result<usize, String> {
    match s.trim().parse::<usize>() {
        Ok(0) => Err("must be at least 1".to_string()),
        Ok(v) => Ok(v),
        Err(e) => Err(format!("`{s}` is not a positive integer: {e}")),
    }
}
