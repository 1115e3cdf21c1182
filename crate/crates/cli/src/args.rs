use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pde_core::cluster::ClusterMethod;
use pde_core::num::{parse_rational, Rational};
use pde_core::periodic::Mapping;
use pde_core::search::{Algorithm, DirectParams, NsParams, NsdiParams};

#[derive(Debug, Parser)]
#[command(name = "pde", version, about = "Periodic demand estimation for tactical service network design")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic instance.
    Gen(GenArgs),
    /// Evaluate one periodic demand: design, flows and plan cost.
    Solve(SolveArgs),
    /// Search for deviation coefficients.
    Search(RunConfig),
    /// Cluster commodities.
    Cluster(ClusterArgs),
    /// Run a grid of mappings and searches and tabulate gaps.
    Bench(BenchArgs),
    /// Instance metrics and mapping baselines.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Scalar,
    Clustered,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgoArg {
    Ns,
    Nsdi,
    Direct,
    Enumerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClusterArg {
    Cv,
    Cr,
    Cru,
}

impl From<ClusterArg> for ClusterMethod {
    fn from(c: ClusterArg) -> Self {
        match c {
            ClusterArg::Cv => ClusterMethod::Cv,
            ClusterArg::Cr => ClusterMethod::Cr,
            ClusterArg::Cru => ClusterMethod::Cru,
        }
    }
}

fn rational(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn mapping(s: &str) -> Result<Mapping, String> {
    s.parse()
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    /// toy1, default, unconstrained or tight.
    #[arg(long, default_value = "default")]
    pub preset: String,
    #[arg(long = "K", alias = "commodities", default_value_t = 4)]
    pub commodities: usize,
    #[arg(long = "T", alias = "periods")]
    pub periods: Option<usize>,
    /// Paths per commodity, counting the outsourcing path.
    #[arg(long)]
    pub paths: Option<usize>,
    /// Commodities per service label.
    #[arg(long)]
    pub tau: Option<usize>,
    #[arg(long)]
    pub capacity_ratio: Option<f64>,
    #[arg(long)]
    pub design_scale: Option<f64>,
    #[arg(long)]
    pub volatility: Option<f64>,
    #[arg(long)]
    pub spike_prob: Option<f64>,
    #[arg(long)]
    pub spike_scale: Option<f64>,
    #[arg(long)]
    pub shared_paths: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Directory for instance.json; stdout if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub instance: PathBuf,
    /// One alpha for all commodities, or one per commodity separated by commas.
    #[arg(long, conflicts_with = "mapping", value_delimiter = ',', value_parser = rational)]
    pub alpha: Vec<Rational>,
    #[arg(long, value_parser = mapping)]
    pub mapping: Option<Mapping>,
    /// Require the cost on observed demand (fails without observed data).
    #[arg(long)]
    pub actual: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Algorithm parameters; unset values take the algorithm defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct AlgoParams {
    /// Neighborhood size.
    #[arg(long = "V")]
    pub v: Option<usize>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Consecutive non-improving iterations before NSDI stops.
    #[arg(long = "M")]
    pub m: Option<usize>,
    #[arg(long)]
    pub b_minus: Option<f64>,
    #[arg(long)]
    pub b_plus: Option<f64>,
    #[arg(long)]
    pub v_plus: Option<f64>,
    /// Start from V=10, beta=0.02, M=7.
    #[arg(long)]
    pub large: bool,
    #[arg(long)]
    pub max_neighbors: Option<usize>,
    /// Initial pattern-search step.
    #[arg(long, value_parser = rational)]
    pub step: Option<Rational>,
    #[arg(long, value_parser = rational)]
    pub min_step: Option<Rational>,
    /// Pattern-search budget in lower-level solves.
    #[arg(long)]
    pub budget: Option<usize>,
}

impl AlgoParams {
    /// `None` for `enumerate`, which has no parameters.
    pub fn algorithm(&self, algo: AlgoArg) -> Option<Algorithm> {
        let base = if self.large { NsdiParams::large() } else { NsdiParams::default() };
        let nsdi = NsdiParams {
            beta: self.beta.unwrap_or(base.beta),
            neighbors: self.v.unwrap_or(base.neighbors),
            max_stall: self.m.unwrap_or(base.max_stall),
            b_minus: self.b_minus.unwrap_or(base.b_minus),
            b_plus: self.b_plus.unwrap_or(base.b_plus),
            v_plus: self.v_plus.unwrap_or(base.v_plus),
            max_neighbors: self.max_neighbors.unwrap_or(base.max_neighbors),
        };
        let d = DirectParams::default();
        match algo {
            AlgoArg::Ns => Some(Algorithm::Ns(NsParams {
                beta: nsdi.beta,
                neighbors: nsdi.neighbors,
            })),
            AlgoArg::Nsdi => Some(Algorithm::Nsdi(nsdi)),
            AlgoArg::Direct => Some(Algorithm::Direct(DirectParams {
                initial_step: self.step.unwrap_or(d.initial_step),
                min_step: self.min_step.unwrap_or(d.min_step),
                budget: self.budget.unwrap_or(d.budget),
            })),
            AlgoArg::Enumerate => None,
        }
    }
}

/// Everything needed to reproduce one search.
#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, value_enum, default_value = "scalar")]
    pub mode: ModeArg,
    /// Required with `--mode clustered`.
    #[arg(long, value_enum)]
    pub clustering: Option<ClusterArg>,
    /// Number of CV clusters.
    #[arg(long, default_value_t = 5)]
    pub clusters: usize,
    #[arg(long, value_enum, default_value = "nsdi")]
    pub algo: AlgoArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub params: AlgoParams,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ClusterArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, value_enum, default_value = "cr")]
    pub clustering: ClusterArg,
    #[arg(long, default_value_t = 5)]
    pub clusters: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, value_enum, value_delimiter = ',', default_values = ["ns", "nsdi", "direct"])]
    pub algos: Vec<AlgoArg>,
    #[arg(long, value_enum, value_delimiter = ',', default_values = ["scalar", "clustered", "full"])]
    pub modes: Vec<ModeArg>,
    /// Clusterings tried in clustered mode.
    #[arg(long, value_enum, value_delimiter = ',', default_values = ["cr"])]
    pub clusterings: Vec<ClusterArg>,
    #[arg(long, default_value_t = 5)]
    pub clusters: usize,
    #[arg(long, value_delimiter = ',', default_values = ["0"])]
    pub seeds: Vec<u64>,
    /// Leave out the four mapping baselines.
    #[arg(long)]
    pub no_mappings: bool,
    /// Add the exhaustive optimum over reachable periodic demands when small enough.
    #[arg(long)]
    pub grid: bool,
    #[command(flatten)]
    pub params: AlgoParams,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
