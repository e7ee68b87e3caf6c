//! Command-line arguments.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "robdcor",
    version,
    about = "Robust distance correlation: tests, scans and robustness curves"
)]
pub struct Cli {
    /// Master seed for every randomized step; drawn from the clock when absent.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Worker threads (overrides ROBDCOR_WORKERS). Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Permutation test of independence between two samples.
    Test(TestArgs),
    /// Test every column of a table against a response column.
    Scan(ScanArgs),
    /// Influence function of a population functional over a grid.
    Ifcurve(IfCurveArgs),
    /// Sensitivity curve of the sample distance variance.
    Sccurve(ScCurveArgs),
    /// Effect of moving one observation far out.
    Breakdown(BreakdownArgs),
    /// Run a simulation experiment described by a TOML file.
    Experiment(ExperimentArgs),
    /// Consistency, comparability and efficiency factors.
    Factors(FactorsArgs),
}

#[derive(Debug, Args)]
pub struct MethodArgs {
    /// classical, biloop, rank or normal_scores.
    #[arg(long, default_value = "classical")]
    pub method: String,

    /// Distance exponent α in (0, 2).
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,

    /// Biloop tuning constant.
    #[arg(long, default_value_t = robdcor::transforms::DEFAULT_BILOOP_C)]
    pub c: f64,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Field delimiter.
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,

    /// The input files have no header line.
    #[arg(long)]
    pub no_header: bool,
}

#[derive(Debug, Args)]
pub struct TestArgs {
    /// CSV with the sample of X (one row per observation).
    #[arg(long)]
    pub x: PathBuf,

    /// CSV with the sample of Y.
    #[arg(long)]
    pub y: PathBuf,

    #[command(flatten)]
    pub method: MethodArgs,

    #[command(flatten)]
    pub input: InputArgs,

    #[arg(long, default_value_t = 0.1)]
    pub level: f64,

    /// Number of permutations; defaults to ⌊200 + 5000/n⌋.
    #[arg(long)]
    pub b: Option<usize>,

    /// Write the JSON result here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// CSV table with one column per variable.
    #[arg(long)]
    pub data: PathBuf,

    /// Name (or 1-based index) of the response column.
    #[arg(long)]
    pub response: String,

    /// Comma-separated methods.
    #[arg(long, value_delimiter = ',', default_value = "classical,biloop")]
    pub methods: Vec<String>,

    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,

    #[arg(long, default_value_t = robdcor::transforms::DEFAULT_BILOOP_C)]
    pub c: f64,

    #[command(flatten)]
    pub input: InputArgs,

    /// Number of permutations; defaults to ⌊200 + 5000/n⌋.
    #[arg(long)]
    pub b: Option<usize>,

    /// Write the scan table here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Also export double-centered distance pairs of this column (name or
    /// 1-based index) against the response.
    #[arg(long, requires = "scatter_out")]
    pub scatter: Option<String>,

    /// CSV path of the exported pairs; the fit summary goes next to it as JSON.
    #[arg(long, requires = "scatter")]
    pub scatter_out: Option<PathBuf>,

    /// Method used for the exported pairs.
    #[arg(long, default_value = "classical")]
    pub scatter_method: String,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FactorChoice {
    /// Gaussian consistency factor c with c·dVar(N(0,σ²)) = σ².
    Consistency,
    /// c_α = dCov(·;1)/dCov(·;α)^{1/α}.
    CAlpha,
    /// v_α = dVar(·;1)/dVar(·;α)^{1/α}.
    VAlpha,
    /// r_α = dCor(·;1)/dCor(·;α)^{1/α}.
    RAlpha,
    /// c_ψ = dCor(X,Y)/dCor(ψ(X),ψ(Y)) for the transform in --method.
    CPsi,
    /// Gaussian asymptotic efficiency of dStd.
    Efficiency,
}

#[derive(Debug, Args)]
pub struct IfCurveArgs {
    /// dcov, dvar, dstd, dcor, dcov_rank, dcov_normal_scores, dcor_rank or
    /// dcor_normal_scores.
    #[arg(long)]
    pub target: String,

    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,

    /// Model law: normal, t:<nu>, uniform, bvn:<rho>, independent.
    #[arg(long, default_value = "normal")]
    pub dist: String,

    /// Grid of s as lo:hi:count.
    #[arg(long, allow_hyphen_values = true, default_value = "-10:10:41")]
    pub grid: String,

    /// Contamination points are (s, direction·s).
    #[arg(long, default_value_t = 1.0)]
    pub direction: f64,

    /// Monte-Carlo size.
    #[arg(long, default_value_t = 100_000)]
    pub mc: usize,

    /// Report the unit-comparable functional k_α·T(α)^{1/α}.
    #[arg(long)]
    pub comparable: bool,

    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScCurveArgs {
    /// Size of the base sample of normal quantiles.
    #[arg(long, default_value_t = 100)]
    pub n: usize,

    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,

    /// Grid of s as lo:hi:count.
    #[arg(long, allow_hyphen_values = true, default_value = "-10:10:41")]
    pub grid: String,

    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BreakdownStatistic {
    /// dVar with x₁ replaced by s; reports the leading-order prediction too.
    Dvar,
    /// dCor of an independent normal sample with (x₁, y₁) replaced by (s, s).
    Dcor,
}

#[derive(Debug, Args)]
pub struct BreakdownArgs {
    #[arg(long, value_enum, default_value = "dvar")]
    pub statistic: BreakdownStatistic,

    #[arg(long, default_value_t = 100)]
    pub n: usize,

    #[command(flatten)]
    pub method: MethodArgs,

    /// Grid of s as lo:hi:count.
    #[arg(long, allow_hyphen_values = true, default_value = "1:1000000:7")]
    pub grid: String,

    /// Space the grid points logarithmically.
    #[arg(long)]
    pub log: bool,

    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// TOML experiment description.
    #[arg(long)]
    pub config: PathBuf,

    /// Result CSV; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FactorsArgs {
    #[arg(long, value_enum)]
    pub kind: FactorChoice,

    #[command(flatten)]
    pub method: MethodArgs,

    /// Model law: normal, t:<nu>, uniform, bvn:<rho>, independent.
    #[arg(long, default_value = "bvn:0.5")]
    pub dist: String,

    /// Monte-Carlo size.
    #[arg(long, default_value_t = 100_000)]
    pub mc: usize,

    #[arg(long)]
    pub out: Option<PathBuf>,
}
