use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "sectorwalk", version, about = "Down-up walks, exact diagnostics and approximate counting on sector-stable densities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw samples with the down-up walk.
    Sample(SampleArgs),
    /// Estimate a partition function or mixed derivative.
    Count(CountArgs),
    /// Exact diagnostics of a small instance by enumeration.
    Diagnose(DiagnoseArgs),
    /// Write a built-in planar graph as a JSON document.
    Generate(GenerateArgs),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleTarget {
    Matchings,
    KMatchings,
    Ndpp,
    Partition,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CountTarget {
    KMatchings,
    Pm,
    MixedDerivative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiagnoseTarget {
    Matchings,
    KMatchings,
    Ndpp,
    Partition,
    Poly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Jsonl,
    Csv,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct InputArgs {
    /// Planar graph document (JSON).
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Kernel matrix, CSV rows or a JSON array of rows.
    #[arg(long)]
    pub kernel: Option<PathBuf>,
    /// Partition constraint document: {"blocks": [[..]], "counts": [..]}.
    #[arg(long)]
    pub constraints: Option<PathBuf>,
    /// Multiaffine polynomial document: {"degree": k, "terms": [{"set": [..], "coeff": c}]}.
    #[arg(long)]
    pub poly: Option<PathBuf>,
    /// Matching size for graph inputs, subset size for kernels.
    #[arg(long, visible_alias = "k")]
    pub size: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct WalkArgs {
    /// Elements exchanged per step; defaults by instance type.
    #[arg(long)]
    pub gap: Option<usize>,
    #[arg(long, default_value_t = 1000)]
    pub steps: usize,
    /// First retained time; defaults to `--steps`, keeping final states only.
    #[arg(long)]
    pub burnin: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub thin: usize,
    #[arg(long, default_value_t = 1)]
    pub chains: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OutputArgs {
    /// Output file; stdout when absent. The manifest goes to `<out>.manifest.json`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Jsonl)]
    pub format: Format,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SampleArgs {
    #[arg(value_enum)]
    pub target: SampleTarget,
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub walk: WalkArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CountArgs {
    #[arg(value_enum)]
    pub target: CountTarget,
    #[command(flatten)]
    pub input: InputArgs,
    /// Mixed-derivative problem: {"directions": [[..]], "counts": [..], "point": [..]}.
    #[arg(long)]
    pub problem: Option<PathBuf>,
    /// Relative accuracy; required for sampled estimates.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Failure probability; required for sampled estimates.
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub gap: Option<usize>,
    /// Down-up steps per chain at every level.
    #[arg(long, default_value_t = 100)]
    pub steps: usize,
    /// Override the sample budget per level.
    #[arg(long)]
    pub samples_per_level: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DiagnoseArgs {
    #[arg(value_enum)]
    pub target: DiagnoseTarget,
    #[command(flatten)]
    pub input: InputArgs,
    /// Exchange size of the walk whose exact gap is reported.
    #[arg(long)]
    pub gap: Option<usize>,
    /// Fractional log-concavity exponents to check.
    #[arg(long, value_delimiter = ',', default_values_t = [0.125, 0.25, 0.5, 1.0])]
    pub alpha: Vec<f64>,
    /// Exponent for the entropy and support bounds; defaults by instance type.
    #[arg(long)]
    pub bound_alpha: Option<f64>,
    /// Enumerate even when C(n, k) exceeds one million.
    #[arg(long)]
    pub force: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GenerateArgs {
    /// path, cycle, grid, wheel or triangulated-grid.
    pub family: String,
    /// Family parameters, e.g. `2,3` for a 2x3 grid.
    #[arg(value_delimiter = ',', required = true)]
    pub params: Vec<usize>,
    /// Weight assigned to every edge.
    #[arg(long)]
    pub edge_weight: Option<f64>,
    /// Weight assigned to every vertex.
    #[arg(long)]
    pub vertex_weight: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
    /// Write to this path instead of the recorded one.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
