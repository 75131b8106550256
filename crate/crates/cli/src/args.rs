use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "omcal",
    version,
    about = "One-step multi-view anchor-graph clustering"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cluster a dataset directory and write labels, results and convergence trace.
    Fit(FitArgs),
    /// Score predicted labels against ground truth; prints JSON.
    Evaluate(EvaluateArgs),
    /// Expand an anchor graph into the full sample-by-sample graph.
    ReconstructGraph(ReconstructArgs),
    /// Time graph construction and solving on synthetic data of growing size.
    Benchmark(BenchmarkArgs),
    /// Fit every cell of an (anchors, beta, gamma) grid.
    Sweep(SweepArgs),
    /// Write a synthetic Gaussian-blob dataset directory.
    Synth(SynthArgs),
}

/// Run parameters shared by `fit` and `sweep`. Flags override the config file,
/// which overrides the preset.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// Dataset directory (holding meta.json).
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// JSON run configuration; unknown keys are rejected.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Built-in parameter set (coil, wiki, usps, reuters, noisymnist, xmedia, cifar10, cifar100, mnist).
    #[arg(long)]
    pub preset: Option<String>,
    /// Number of clusters.
    #[arg(long, short = 'c')]
    pub clusters: Option<usize>,
    /// Anchors per view.
    #[arg(long, short = 'm')]
    pub anchors: Option<usize>,
    /// Nearest anchors per sample.
    #[arg(long, short = 'k')]
    pub neighbors: Option<usize>,
    /// Nuclear-norm weight.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Factorization weight.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Relative objective change that stops the solver.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Seeds both anchor selection and solver initialization.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides the anchor-selection seed only.
    #[arg(long)]
    pub anchor_seed: Option<u64>,
    #[arg(long)]
    pub kmeans_iters: Option<usize>,
    /// Z-score every feature before building graphs.
    #[arg(long)]
    pub normalize: bool,
    /// Cluster one view without view weighting.
    #[arg(long)]
    pub single_view: bool,
    /// View used by --single-view.
    #[arg(long, default_value_t = 0, requires = "single_view")]
    pub view: usize,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Output directory.
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,
    /// Reuse anchor graphs stored under the output directory, building them once.
    #[arg(long)]
    pub cache_graphs: bool,
    /// Also write the learned consensus anchor graph as consensus.csv.
    #[arg(long)]
    pub write_consensus: bool,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Ground-truth labels, one per line.
    #[arg(long)]
    pub truth: PathBuf,
    /// Predicted labels, one per line.
    #[arg(long)]
    pub pred: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MatrixFormat {
    Csv,
    F64le,
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    /// Anchor graph as headerless CSV (n rows, m columns).
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, short = 'o')]
    pub out: PathBuf,
    /// Keep only the largest entries per row, written as row,col,weight CSV.
    /// Required above 20000 samples.
    #[arg(long)]
    pub top_k: Option<usize>,
    /// Format of the dense output.
    #[arg(long, value_enum, default_value_t = MatrixFormat::Csv)]
    pub format: MatrixFormat,
    /// Zero negative entries first (learned consensus graphs may have tiny ones).
    #[arg(long)]
    pub clip_negative: bool,
}

#[derive(Debug, Args)]
pub struct BenchmarkArgs {
    /// Sample counts to time.
    #[arg(long, value_delimiter = ',', default_values_t = [1000, 2000, 4000, 8000])]
    pub sizes: Vec<usize>,
    #[arg(long, short = 'm', default_value_t = 30)]
    pub anchors: usize,
    #[arg(long, short = 'c', default_value_t = 5)]
    pub clusters: usize,
    /// Feature dimension of every view.
    #[arg(long, default_value_t = 20)]
    pub dims: usize,
    #[arg(long, default_value_t = 1)]
    pub views: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Timed runs per size; the fastest is reported.
    #[arg(long, default_value_t = 1)]
    pub repeats: usize,
    /// CSV report path; stdout when omitted.
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Anchor counts to try (defaults to the configured value).
    #[arg(long, value_delimiter = ',')]
    pub anchors_grid: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    pub beta_grid: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub gamma_grid: Vec<f64>,
    /// CSV report path.
    #[arg(long, short = 'o')]
    pub out: PathBuf,
    /// Also write one JSON file per cell here.
    #[arg(long)]
    pub cells_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, short = 'o')]
    pub out: PathBuf,
    #[arg(long, short = 'n', default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, short = 'c', default_value_t = 5)]
    pub clusters: usize,
    /// Feature dimension per view.
    #[arg(long, value_delimiter = ',', default_values_t = [10, 20])]
    pub dims: Vec<usize>,
    #[arg(long, default_value_t = 5.0)]
    pub separation: f64,
    #[arg(long, default_value_t = 1.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Store views as raw little-endian f64 instead of CSV.
    #[arg(long)]
    pub binary: bool,
}
