// SPDX-License-Identifier: MIT OR Apache-2.0

use std::path::PathBuf;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use hdcp::limits::{LimitLaw, Resolution, DEFAULT_GRID, DEFAULT_REPS};

/// Change-point tests for high-dimensional time series.
///
/// Exit status: 0 when no change is detected, 2 when `test` rejects, 1 on error.
/// `--config FILE` reads `key=value` defaults for the subcommand's flags.
#[derive(Debug, Parser)]
#[command(name = "hdcp", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Test a panel CSV for a change in mean.
    #[command(args_override_self = true)]
    Test(TestArgs),
    /// Locate multiple changes by binary segmentation; prints CSV.
    #[command(args_override_self = true)]
    Segment(SegmentArgs),
    /// Simulate a critical-value table for a null limit law.
    #[command(args_override_self = true)]
    Critval(CritvalArgs),
    /// Print high-dimensional efficiencies as key=value lines.
    #[command(args_override_self = true)]
    Efficiency(EfficiencyArgs),
    /// Run a size or power experiment and write its CSV files.
    #[command(args_override_self = true)]
    Figures(FiguresArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Projection,
    Panel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StatisticArg {
    Max,
    Sum,
    SumSquared,
    EpidemicMax,
    EpidemicSum,
    /// Panel statistic averaged over time.
    Int,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PresetArg {
    /// `Sigma^{-1} Delta`; needs `--delta` and `--sigma`.
    Oracle,
    /// `Delta`; needs `--delta`.
    PreOracle,
    /// `Lambda^{-1} Delta`; needs `--delta` and `--variances`.
    Quasi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VarianceArg {
    /// From `--tau`, `--sigma` or `--variances`.
    Known,
    Naive,
    /// Variance estimate split at the CUSUM argmax.
    Split,
}

#[derive(Debug, Clone, Args)]
pub struct DirectionArgs {
    /// Single-column CSV with the projection direction.
    #[arg(long, conflicts_with = "preset")]
    pub direction: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub preset: Option<PresetArg>,
    /// Single-column CSV with the change vector.
    #[arg(long)]
    pub delta: Option<PathBuf>,
    /// Single-column CSV with component variances.
    #[arg(long)]
    pub variances: Option<PathBuf>,
    /// Square CSV with the error covariance.
    #[arg(long)]
    pub sigma: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct DetectorArgs {
    #[arg(long, value_enum, default_value_t = MethodArg::Projection)]
    pub method: MethodArg,
    #[arg(long, value_enum, default_value_t = StatisticArg::Max)]
    pub statistic: StatisticArg,
    #[command(flatten)]
    pub direction: DirectionArgs,
    /// Known long-run scale of the projected series.
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long, value_enum, default_value_t = VarianceArg::Split)]
    pub variance: VarianceArg,
    /// Weight exponent in [0, 0.5).
    #[arg(long, default_value_t = 0.0)]
    pub beta: f64,
}

#[derive(Debug, Clone, Args)]
pub struct NullArgs {
    /// Simulated null draws.
    #[arg(long, default_value_t = 10_000)]
    pub reps: usize,
    /// Grid size of the simulated limit process.
    #[arg(long, default_value_t = DEFAULT_GRID)]
    pub grid: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = Resolution::Continuous)]
    pub resolution: Resolution,
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Panel CSV; rows are time points, columns are components.
    #[arg(long)]
    pub input: PathBuf,
    /// Rows are components, columns are time points.
    #[arg(long)]
    pub transpose: bool,
}

#[derive(Debug, Clone, Args)]
pub struct TestArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub detector: DetectorArgs,
    #[command(flatten)]
    pub null: NullArgs,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
}

#[derive(Debug, Clone, Args)]
pub struct SegmentArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub detector: DetectorArgs,
    #[command(flatten)]
    pub null: NullArgs,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = 10)]
    pub min_segment: usize,
    /// Treat the input as prices and test their modified log squared returns.
    #[arg(long)]
    pub fuller: bool,
    #[arg(long, default_value_t = hdcp::segment::DEFAULT_FULLER_TAU)]
    pub fuller_tau: f64,
}

#[derive(Debug, Clone, Args)]
pub struct CritvalArgs {
    /// Law descriptor, e.g. `bridge-sup`, `bridge-sup:0.25`, `panel-sup`, `mixture-panel:0.5`.
    #[arg(long)]
    pub law: LimitLaw,
    /// Levels added to the default 0.01, 0.025, 0.05, 0.10.
    #[arg(long, value_delimiter = ',', default_value = "0.05", action = ArgAction::Set)]
    pub alpha: Vec<f64>,
    #[arg(long, default_value_t = DEFAULT_REPS)]
    pub reps: usize,
    #[arg(long, default_value_t = DEFAULT_GRID)]
    pub grid: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = Resolution::Continuous)]
    pub resolution: Resolution,
    /// Output file; defaults to the table directory.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Table directory; overrides `HDCP_TABLE_DIR`.
    #[arg(long)]
    pub table_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct EfficiencyArgs {
    #[command(flatten)]
    pub direction: DirectionArgs,
    /// Identity covariance of the dimension of `--delta`.
    #[arg(long, conflicts_with_all = ["sigma", "s", "phi"])]
    pub identity: bool,
    /// Single-column CSV of idiosyncratic scales `s`.
    #[arg(long, conflicts_with = "sigma")]
    pub s: Option<PathBuf>,
    /// Single-column CSV of common-factor loadings `Phi`.
    #[arg(long, conflicts_with = "sigma")]
    pub phi: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProjectionVarianceArg {
    Known,
    Naive,
    Split,
}

#[derive(Debug, Clone, Args)]
pub struct FiguresArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=5))]
    pub figure: u8,
    #[arg(long, default_value = "results")]
    pub out_dir: PathBuf,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub t: Option<usize>,
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long)]
    pub null_reps: Option<usize>,
    #[arg(long)]
    pub level: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Comma-separated sweep values.
    #[arg(long, value_delimiter = ',', action = ArgAction::Set)]
    pub sweep: Option<Vec<f64>>,
    /// Fixed change norm for figures 2 to 4.
    #[arg(long)]
    pub change_norm: Option<f64>,
    #[arg(long, value_enum)]
    pub variance: Option<ProjectionVarianceArg>,
    /// Limit-law simulation behind figure 1's critical values.
    #[arg(long)]
    pub calibration_grid: Option<usize>,
    #[arg(long)]
    pub calibration_reps: Option<usize>,
    #[arg(long)]
    pub calibration_resolution: Option<Resolution>,
    /// Angles between change and loading for figure 4.
    #[arg(long, value_delimiter = ',', action = ArgAction::Set)]
    pub angles: Option<Vec<f64>>,
    /// Loadings for figure 5.
    #[arg(long, value_delimiter = ',', action = ArgAction::Set)]
    pub phis: Option<Vec<f64>>,
}
