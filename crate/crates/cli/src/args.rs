use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use spd_augment::data::SeriesLayout;
use spd_augment::{KernelSpace, Strategy, Task};

/// Geodesic mixup and diagnostics for datasets of SPD matrices.
///
/// Reports go to stdout as CSV or one-line JSON; prose goes to stderr.
/// Exit status: 0 ok, 1 I/O, 2 usage, 3 incompatible input, 4 invariant violated.
#[derive(Debug, Parser)]
#[command(name = "spd-augment", version)]
pub struct Cli {
    /// File of `key = value` lines supplying defaults for the subcommand's
    /// flags. Flags given on the command line win; unknown keys are rejected.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic matrix dataset or time series.
    Gen(GenArgs),
    /// Augment a dataset with one mixing or dropping strategy.
    Mix(MixArgs),
    /// Eigenvalue positivity report for matrices or series.
    Diagnose(DiagnoseArgs),
    /// Compare kernel-regression loss on geodesic and straight-line mixes.
    Regress(RegressArgs),
    /// Reconstruct middle samples from label-ordered triples.
    Probe(ProbeArgs),
    /// Time direct, cached and linear mixing.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    /// exp(B + yH) family with uniform labels.
    LogLinear,
    /// Separated class centers.
    Clustered,
    /// One multivariate time series (CSV).
    Series,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TaskArg {
    Regression,
    Classification,
}

impl From<TaskArg> for Task {
    fn from(t: TaskArg) -> Self {
        match t {
            TaskArg::Regression => Task::Regression,
            TaskArg::Classification => Task::Classification,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LayoutArg {
    VarsAsRows,
    VarsAsCols,
}

impl From<LayoutArg> for SeriesLayout {
    fn from(l: LayoutArg) -> Self {
        match l {
            LayoutArg::VarsAsRows => SeriesLayout::VarsAsRows,
            LayoutArg::VarsAsCols => SeriesLayout::VarsAsCols,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Rmixup,
    Vmixup,
    Dmixup,
    Dropnode,
    Dropedge,
    Gmixup,
    Cmixup,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Rmixup => Strategy::RMixup,
            StrategyArg::Vmixup => Strategy::VMixup,
            StrategyArg::Dmixup => Strategy::DMixup,
            StrategyArg::Dropnode => Strategy::DropNode,
            StrategyArg::Dropedge => Strategy::DropEdge,
            StrategyArg::Gmixup => Strategy::GMixup,
            StrategyArg::Cmixup => Strategy::CMixup,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Reduce {
    /// Keep the first t steps.
    Truncate,
    /// Average consecutive blocks down to t steps.
    Average,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MatrixKind {
    Correlation,
    Covariance,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SpaceArg {
    Riemannian,
    Euclidean,
}

impl From<SpaceArg> for KernelSpace {
    fn from(s: SpaceArg) -> Self {
        match s {
            SpaceArg::Riemannian => KernelSpace::Riemannian,
            SpaceArg::Euclidean => KernelSpace::Euclidean,
        }
    }
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum, default_value_t = Kind::LogLinear)]
    pub kind: Kind,
    /// Matrix dimension, or number of variables for a series.
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    /// Series length; defaults to 2n.
    #[arg(long)]
    pub t: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Defaults to regression for log-linear and classification for clustered.
    #[arg(long, value_enum)]
    pub task: Option<TaskArg>,
    /// Log-space perturbation (log-linear) or observation noise (series).
    #[arg(long)]
    pub noise: Option<f64>,
    #[arg(long, default_value_t = 2)]
    pub classes: usize,
    /// Per-sample jitter around each class center.
    #[arg(long, default_value_t = 0.2)]
    pub spread: f64,
    /// Number of latent sources in a series; defaults to n.
    #[arg(long)]
    pub latent_rank: Option<usize>,
    #[arg(long, value_enum, default_value_t = LayoutArg::VarsAsCols)]
    pub series_layout: LayoutArg,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct MixArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    /// Augmented dataset; provenance goes next to it as `<stem>.provenance.csv`.
    #[arg(short, long)]
    pub output: PathBuf,
    #[arg(long, value_enum, default_value_t = StrategyArg::Rmixup)]
    pub strategy: StrategyArg,
    /// Symmetric Beta(alpha, alpha) shape for the mixing ratio.
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Keep probability for dropnode and dropedge.
    #[arg(long, default_value_t = 0.8)]
    pub keep_prob: f64,
    /// Number of augmented samples; defaults to the dataset size.
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Reuse per-sample eigendecompositions for rmixup.
    #[arg(long, value_enum, default_value_t = Switch::On)]
    pub cache: Switch,
    /// Label-kernel width for cmixup; defaults to the label standard deviation.
    #[arg(long)]
    pub bandwidth: Option<f64>,
}

#[derive(Debug, Args)]
pub struct DiagnoseArgs {
    /// `.spdb` matrix datasets or series CSV files.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = LayoutArg::VarsAsCols)]
    pub series_layout: LayoutArg,
    /// Matrix built from each series.
    #[arg(long, value_enum, default_value_t = MatrixKind::Correlation)]
    pub matrix: MatrixKind,
    /// Series length behind `.spdb` inputs, used for the rank bound.
    #[arg(long)]
    pub t: Option<usize>,
    /// Comma-separated series lengths to reduce each series to.
    #[arg(long, value_delimiter = ',')]
    pub sweep: Option<Vec<usize>>,
    #[arg(long, value_enum, default_value_t = Reduce::Truncate)]
    pub reduce: Reduce,
    /// CSV destination; without it the CSV goes to stdout and the summary to stderr.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RegressArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9")]
    pub lambdas: Vec<f64>,
    /// Kernel width; defaults to the median pairwise distance.
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long, value_enum, default_value_t = SpaceArg::Riemannian)]
    pub space: SpaceArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV destination; without it the CSV goes to stdout and the summary to stderr.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ProbeArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "8,50,120,360")]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = 64)]
    pub batch: usize,
    #[arg(long, default_value_t = 5)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV destination; without it the CSV goes to stdout and the summary to stderr.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}
