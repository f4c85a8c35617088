use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "susyzeta",
    version,
    about = "Batch pipeline for a supersymmetric fractal model of the Riemann zeta zeros",
    long_about = "Computes Riemann zeros, smooth Wu-Sprung turning points, Weierstrass fractal \
                  curves, CBC quantization ratios, differential-evolution parameter fits, and \
                  post-fit statistics. Every run writes its artifacts plus a resolved \
                  configuration echo under the output directory."
)]
pub struct Cli {
    /// TOML configuration file; command-line flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Root directory for run artifacts.
    #[arg(long, global = true)]
    pub outdir: Option<PathBuf>,

    /// Run label; defaults to a UTC timestamp.
    #[arg(long, global = true)]
    pub label: Option<String>,

    /// Worker thread count (also SUSYZETA_THREADS).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Acquire zeta zeros: from the built-in table, a file, or computed
    /// from the Riemann-Siegel Z function.
    Zeros(ZerosArgs),
    /// Smooth turning points of the translated Wu-Sprung potential.
    TurningPoints(TurningPointsArgs),
    /// Sample the (optionally affine-transformed) Weierstrass curve.
    Weier(WeierArgs),
    /// CBC quantization integrals and ratios per level.
    CbcRatios(CbcRatiosArgs),
    /// Adjust one turning point toward unit CBC ratio.
    Adjust(AdjustArgs),
    /// Joint differential-evolution fit.
    Fit(FitArgs),
    /// Deterministic re-evaluation of a parameter set.
    Replay(ReplayArgs),
    /// Two-step iteration: phase fit, then per-level adjustment.
    Iterate(IterateArgs),
    /// Statistics: Rao spacing test, shifted correlations, residuals.
    Analyze(AnalyzeArgs),
    /// Closed-form turning-point identity checks.
    Identities(IdentitiesArgs),
    /// Dominici series versus the direct numerical inverse.
    Dominici(DominiciArgs),
}

#[derive(Debug, Args, Default)]
pub struct ZerosArgs {
    /// Number of zeros.
    #[arg(long)]
    pub count: Option<usize>,
    /// Compute from the Riemann-Siegel scan instead of a table.
    #[arg(long)]
    pub compute: bool,
    /// Scan grid step for --compute.
    #[arg(long)]
    pub grid_step: Option<f64>,
    /// Zero-table file (defaults to the built-in reference table).
    #[arg(long)]
    pub table: Option<PathBuf>,
}

#[derive(Debug, Args, Default)]
pub struct TurningPointsArgs {
    /// Number of levels.
    #[arg(long)]
    pub n: Option<usize>,
    /// Zero-table file (defaults to the built-in reference table).
    #[arg(long)]
    pub zeros: Option<PathBuf>,
}

#[derive(Debug, Args, Default)]
pub struct WeierArgs {
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Scaled phases alpha_k in [0, 1], comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub alpha: Option<Vec<f64>>,
    /// Physical phases (2 pi alpha_k), comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub alpha_physical: Option<Vec<f64>>,
    /// All-zero phases of this truncation order.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub scale: Option<f64>,
    #[arg(long)]
    pub offset: Option<f64>,
    #[arg(long)]
    pub x_min: Option<f64>,
    #[arg(long)]
    pub x_max: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Debug, Args, Default)]
pub struct CbcRatiosArgs {
    /// Number of levels.
    #[arg(long)]
    pub n: Option<usize>,
    /// Turning points (comma-separated); defaults to the smooth ones.
    #[arg(long, value_delimiter = ',')]
    pub x: Option<Vec<f64>>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub alpha: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub alpha_physical: Option<Vec<f64>>,
    #[arg(long)]
    pub zeros: Option<PathBuf>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
    /// Singularity handling: power-sub | gauss-jacobi.
    #[arg(long)]
    pub substitution: Option<String>,
}

#[derive(Debug, Args, Default)]
pub struct AdjustArgs {
    /// Level index (1-based).
    #[arg(long)]
    pub j: Option<usize>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub alpha: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub alpha_physical: Option<Vec<f64>>,
    #[arg(long)]
    pub search_lo: Option<f64>,
    #[arg(long)]
    pub search_hi: Option<f64>,
    #[arg(long)]
    pub zeros: Option<PathBuf>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
}

#[derive(Debug, Args, Default)]
pub struct FitArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// free | zero | monotone.
    #[arg(long)]
    pub phase_mode: Option<String>,
    /// fixed1 | free.
    #[arg(long)]
    pub sigma: Option<String>,
    #[arg(long)]
    pub sigma_lo: Option<f64>,
    #[arg(long)]
    pub sigma_hi: Option<f64>,
    #[arg(long)]
    pub gamma_lo: Option<f64>,
    #[arg(long)]
    pub gamma_hi: Option<f64>,
    /// smooth | free.
    #[arg(long)]
    pub x_mode: Option<String>,
    #[arg(long)]
    pub w_susy: Option<f64>,
    #[arg(long)]
    pub w_cbc: Option<f64>,
    #[arg(long)]
    pub population: Option<usize>,
    #[arg(long)]
    pub generations: Option<usize>,
    /// Differential weight.
    #[arg(long)]
    pub de_f: Option<f64>,
    /// Crossover rate.
    #[arg(long)]
    pub de_cr: Option<f64>,
    #[arg(long)]
    pub zeros: Option<PathBuf>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
    #[arg(long)]
    pub node_budget: Option<usize>,
}

#[derive(Debug, Args, Default)]
pub struct ReplayArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub alpha: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub alpha_physical: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub x: Option<Vec<f64>>,
    #[arg(long)]
    pub zeros: Option<PathBuf>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
}

#[derive(Debug, Args, Default)]
pub struct IterateArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub generations: Option<usize>,
    #[arg(long)]
    pub zeros: Option<PathBuf>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
}

#[derive(Debug, Args, Default)]
pub struct AnalyzeArgs {
    /// Angles for the Rao spacing test (comma-separated, radians; wrapped
    /// into [0, 2 pi)).
    #[arg(long, value_delimiter = ',')]
    pub rao: Option<Vec<f64>>,
    /// File of angles (one per line) for the Rao test.
    #[arg(long)]
    pub rao_file: Option<PathBuf>,
    /// First angle set for the shifted correlation sweep.
    #[arg(long)]
    pub correlate_a: Option<PathBuf>,
    /// Second angle set (the shifted one).
    #[arg(long)]
    pub correlate_b: Option<PathBuf>,
    /// Theta grid size for the sweep.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Fit result JSON for residual extraction.
    #[arg(long)]
    pub residuals: Option<PathBuf>,
    #[arg(long)]
    pub zeros: Option<PathBuf>,
}

#[derive(Debug, Args, Default)]
pub struct IdentitiesArgs {
    /// Identity index 1..=5; all five when omitted.
    #[arg(long)]
    pub id: Option<usize>,
    #[arg(long)]
    pub zeros: Option<PathBuf>,
}

#[derive(Debug, Args, Default)]
pub struct DominiciArgs {
    #[arg(long)]
    pub x_max: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
}
