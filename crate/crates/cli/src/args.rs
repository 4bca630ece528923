use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "kgrowth", version, about = "Knowledge-growth laws, graph metrics and disruption analysis")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Write plot data as long-format CSV with header `series,x,y`.
    #[arg(long, global = true, value_name = "PATH")]
    pub plot_csv: Option<PathBuf>,
    /// Write the machine-readable report (JSON with schema_version) here.
    #[arg(long, global = true, value_name = "PATH")]
    pub json: Option<PathBuf>,
    /// Seed for every randomized step.
    #[arg(long, global = true, value_name = "N", default_value_t = 0)]
    pub seed: u64,
    /// Suppress the human summary on stdout.
    #[arg(long, short, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a growth family (or select the best of a set) to a monthly series.
    Fit(FitArgs),
    /// Extrapolate a saved fit or a built-in model month by month.
    Forecast(ForecastArgs),
    /// Find the breakpoint between an early and a late growth regime.
    Segment(SegmentArgs),
    /// Structural metrics of one or more edge-list snapshots.
    Metrics(MetricsArgs),
    /// Generate a Barabási–Albert graph and compare it with theory.
    Ba(BaArgs),
    /// Fit a lognormal or discrete power law to samples or degrees.
    Distfit(DistfitArgs),
    /// Disruption scores, rankings and inclusion lag for citation data.
    Disrupt(DisruptArgs),
    /// Intersect two id sets with top-percentile prefixes of a ranking.
    Intersect(IntersectArgs),
    /// Category hierarchy: cycles and depth-limited membership counts.
    Taxonomy(TaxonomyArgs),
}

#[derive(Debug, Args)]
pub struct SeriesInput {
    /// Series CSV: `date,value` rows with date as YYYY-MM (header optional, `#` comments).
    #[arg(long, short, value_name = "PATH")]
    pub input: PathBuf,
    /// Accept missing months (fits on the observed months only).
    #[arg(long)]
    pub allow_gaps: bool,
    /// Use observations from this month on (YYYY-MM).
    #[arg(long, value_name = "YYYY-MM")]
    pub from: Option<String>,
    /// Use observations up to this month (YYYY-MM).
    #[arg(long, value_name = "YYYY-MM")]
    pub to: Option<String>,
    /// Malformed rows to skip before failing.
    #[arg(long, value_name = "N", default_value_t = 0)]
    pub error_budget: usize,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub series: SeriesInput,
    /// Family name (e.g. LogIntegral, Polynomial(3)), `auto` for the
    /// quasi-linear set, or `all`.
    #[arg(long, short, value_name = "NAME", default_value = "auto")]
    pub family: String,
    /// Comma-separated candidate families for selection (overrides --family).
    #[arg(long, value_name = "LIST", value_delimiter = ',')]
    pub families: Vec<String>,
    /// Month mapped to t = 1 (YYYY-MM); defaults to the first observation.
    #[arg(long, value_name = "YYYY-MM")]
    pub origin: Option<String>,
    /// Levenberg–Marquardt iteration budget.
    #[arg(long, value_name = "N", default_value_t = 200)]
    pub max_iter: usize,
    /// Also extrapolate the best fit through this month (YYYY-MM).
    #[arg(long, value_name = "YYYY-MM")]
    pub until: Option<String>,
}

#[derive(Debug, Args)]
pub struct ForecastArgs {
    /// Fit report JSON written by `fit --json`.
    #[arg(long, value_name = "PATH", conflicts_with = "model", required_unless_present_any = ["model", "list_models"])]
    pub fit: Option<PathBuf>,
    /// Built-in model name (see --list-models).
    #[arg(long, value_name = "NAME")]
    pub model: Option<String>,
    /// List built-in models and exit.
    #[arg(long)]
    pub list_models: bool,
    /// Last forecast month (YYYY-MM).
    #[arg(long, value_name = "YYYY-MM", required_unless_present = "list_models")]
    pub until: Option<String>,
    /// First month for built-in models (YYYY-MM); defaults to the model origin.
    #[arg(long, value_name = "YYYY-MM")]
    pub from: Option<String>,
    /// Emit the monthly increment instead of the level.
    #[arg(long)]
    pub increment: bool,
}

#[derive(Debug, Args)]
pub struct SegmentArgs {
    #[command(flatten)]
    pub series: SeriesInput,
    /// Family for the early regime.
    #[arg(long, value_name = "NAME", default_value = "Exponential")]
    pub early: String,
    /// Family for the late regime.
    #[arg(long, value_name = "NAME", default_value = "LogIntegral")]
    pub late: String,
}

#[derive(Debug, Args)]
pub struct GraphInput {
    /// Edge list TSV: `src<TAB>dst` per line, opaque string ids, `#` comments.
    #[arg(long, short, value_name = "PATH", required = true)]
    pub input: Vec<PathBuf>,
    /// Malformed rows to skip before failing.
    #[arg(long, value_name = "N", default_value_t = 0)]
    pub error_budget: usize,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    #[command(flatten)]
    pub graph: GraphInput,
    /// BFS sources for path metrics (all nodes when >= N).
    #[arg(long, value_name = "N", default_value_t = 200)]
    pub sources: usize,
    /// Quantile for the effective diameter, in (0, 1].
    #[arg(long, value_name = "Q", default_value_t = 0.9)]
    pub quantile: f64,
    /// Degree direction for entropy and power-law fit: in, out or total.
    #[arg(long, value_name = "DIR", default_value = "total")]
    pub direction: String,
    /// Compute path metrics and clustering on the undirected projection.
    #[arg(long)]
    pub undirected: bool,
    /// Reference entropy curve constants `A,c,x` to add to the plot.
    #[arg(long, value_name = "A,c,x", value_delimiter = ',', num_args = 3)]
    pub entropy_ref: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct BaArgs {
    /// Final node count n (> m).
    #[arg(long, value_name = "N")]
    pub nodes: usize,
    /// Edges per arriving node (>= 1).
    #[arg(long, value_name = "M")]
    pub m: usize,
    /// Write the edge list TSV (`src<TAB>dst`) here.
    #[arg(long, short, value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// BFS sources for the diameter estimate.
    #[arg(long, value_name = "N", default_value_t = 200)]
    pub sources: usize,
    /// Skip the metric comparison (generation only).
    #[arg(long)]
    pub no_compare: bool,
}

#[derive(Debug, Args)]
pub struct DistfitArgs {
    /// `lognormal` or `powerlaw`.
    #[arg(long, value_name = "FAMILY")]
    pub family: String,
    /// Samples file: one positive number per line.
    #[arg(long, short, value_name = "PATH", required_unless_present = "edges", conflicts_with = "edges")]
    pub input: Option<PathBuf>,
    /// Take degrees from this edge list TSV instead of a samples file.
    #[arg(long, value_name = "PATH")]
    pub edges: Option<PathBuf>,
    /// Degree direction with --edges: in, out or total.
    #[arg(long, value_name = "DIR", default_value = "total")]
    pub direction: String,
    /// Power-law lower cutoff: a positive integer or `auto`.
    #[arg(long, value_name = "K|auto", default_value = "auto")]
    pub kmin: String,
    /// Histogram bins for the plot.
    #[arg(long, value_name = "N", default_value_t = 40)]
    pub bins: usize,
}

#[derive(Debug, Args)]
pub struct DisruptArgs {
    /// Papers TSV: `id<TAB>year[<TAB>field]`.
    #[arg(long, value_name = "PATH", requires = "edges")]
    pub nodes: Option<PathBuf>,
    /// Citations TSV: `citing<TAB>cited`.
    #[arg(long, value_name = "PATH", requires = "nodes")]
    pub edges: Option<PathBuf>,
    /// Score only these papers (repeatable).
    #[arg(long, value_name = "ID")]
    pub focal: Vec<String>,
    /// Report the top K papers by --key.
    #[arg(long, value_name = "K")]
    pub top: Option<usize>,
    /// Ranking key: citations or disruption.
    #[arg(long, value_name = "KEY", default_value = "disruption")]
    pub key: String,
    /// Inclusive publication-year filter for ranking, `FROM:TO`.
    #[arg(long, value_name = "FROM:TO")]
    pub years: Option<String>,
    /// Count only citers within this many years after the focal paper.
    #[arg(long, value_name = "YEARS")]
    pub window: Option<i32>,
    /// Write all scores as TSV `id<TAB>n_i<TAB>n_j<TAB>n_k<TAB>d<TAB>defined`.
    #[arg(long, value_name = "PATH")]
    pub scores: Option<PathBuf>,
    /// Write the ranked ids, one per line (usable as --ctop or --a/--b).
    #[arg(long, value_name = "PATH", requires = "top")]
    pub ids_out: Option<PathBuf>,
    /// Inclusion-lag pairs TSV: `pub_year<TAB>incl_year[<TAB>field]`.
    #[arg(long, value_name = "PATH", required_unless_present = "nodes")]
    pub lag: Option<PathBuf>,
    /// Histogram bins for the D distribution plot.
    #[arg(long, value_name = "N", default_value_t = 20)]
    pub bins: usize,
}

#[derive(Debug, Args)]
pub struct IntersectArgs {
    /// First id set: one id per line.
    #[arg(long, value_name = "PATH")]
    pub a: PathBuf,
    /// Second id set: one id per line.
    #[arg(long, value_name = "PATH")]
    pub b: PathBuf,
    /// Ranked id list, best first, one id per line.
    #[arg(long, value_name = "PATH")]
    pub ctop: PathBuf,
    /// Comma-separated percentiles in (0, 100].
    #[arg(long, value_name = "LIST", value_delimiter = ',', default_value = "1,2,5,10,20,50,100")]
    pub percentiles: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct TaxonomyArgs {
    /// Category TSV: `child<TAB>parent<TAB>kind` with kind article|category.
    #[arg(long, short, value_name = "PATH")]
    pub input: PathBuf,
    /// Comma-separated root categories.
    #[arg(long, value_name = "LIST", value_delimiter = ',', conflicts_with = "preset")]
    pub roots: Vec<String>,
    /// Named root list from the presets (built-in: broad, core).
    #[arg(long, value_name = "NAME")]
    pub preset: Option<String>,
    /// TOML presets file with `[presets.NAME] roots = [...]` tables.
    #[arg(long, value_name = "PATH")]
    pub presets_file: Option<PathBuf>,
    /// Levels below the roots (roots are level 0).
    #[arg(long, value_name = "N", default_value_t = 3)]
    pub depth: usize,
    /// Report cycles in the category subgraph.
    #[arg(long)]
    pub cycles: bool,
    /// Malformed rows to skip before failing.
    #[arg(long, value_name = "N", default_value_t = 0)]
    pub error_budget: usize,
}
