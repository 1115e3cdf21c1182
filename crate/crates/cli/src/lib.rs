//! Command implementations behind the `pde` binary.
//!
//! Every `cmd_*` function returns a serializable report; [`execute`] runs a
//! parsed command line, prints the report as JSON and writes JSON/CSV files
//! when `--out` is given.

pub mod args;
mod output;

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;

use pde_core::cluster::{cluster_cr, cluster_cru, cluster_cv, ClusterMethod, Clustering};
use pde_core::generate::{generate, preset, GenSpec};
use pde_core::lowersolve::{evaluate_cpde, CostBreakdown};
use pde_core::metrics::{gap_table, profile, InstanceProfile};
use pde_core::model::{read_instance, save_instance};
use pde_core::num::{self, Rational};
use pde_core::periodic::{mapping, DemandProfile, DeviationVector, Mapping};
use pde_core::search::{
    enumerate_mappings, grid_optimum, run, Evaluator, SearchResult, SearchSpace, SpaceMode, TracePoint, GRID_LIMIT,
};
use pde_core::Instance;

pub use args::{AlgoArg, AlgoParams, BenchArgs, ClusterArg, ClusterArgs, Cli, Command, GenArgs, ModeArg, ReportArgs, RunConfig, SolveArgs};
pub use output::{write_csv, write_json};

pub fn load(path: &Path) -> Result<Instance> {
    read_instance(path).with_context(|| format!("loading {}", path.display()))
}

pub fn build_clustering(inst: &Instance, method: ClusterMethod, clusters: usize) -> Result<Clustering> {
    Ok(match method {
        ClusterMethod::Cv => cluster_cv(inst, clusters),
        ClusterMethod::Cr => cluster_cr(inst)?,
        ClusterMethod::Cru => cluster_cru(inst)?,
        ClusterMethod::Singleton => Clustering::singleton(inst),
        ClusterMethod::Global => Clustering::global(inst),
    })
}

pub fn build_space(inst: &Instance, mode: ModeArg, clustering: Option<ClusterArg>, clusters: usize) -> Result<SearchSpace> {
    Ok(match mode {
        ModeArg::Scalar => SearchSpace::scalar(inst),
        ModeArg::Full => SearchSpace::full(inst),
        ModeArg::Clustered => {
            let method = clustering.ok_or_else(|| anyhow!("--mode clustered needs --clustering cv|cr|cru"))?;
            SearchSpace::clustered(inst, build_clustering(inst, method.into(), clusters)?)
        }
    })
}

// ---- gen

pub fn gen_spec(args: &GenArgs) -> GenSpec {
    let base = match args.preset.as_str() {
        "unconstrained" => GenSpec::unconstrained(args.commodities),
        "tight" => GenSpec::tight(args.commodities),
        _ => GenSpec {
            commodities: args.commodities,
            tau: GenSpec::default().tau.min(args.commodities.max(1)),
            ..GenSpec::default()
        },
    };
    GenSpec {
        periods: args.periods.unwrap_or(base.periods),
        paths_per_commodity: args.paths.unwrap_or(base.paths_per_commodity),
        tau: args.tau.unwrap_or(base.tau),
        capacity_ratio: args.capacity_ratio.unwrap_or(base.capacity_ratio),
        design_scale: args.design_scale.unwrap_or(base.design_scale),
        volatility: args.volatility.unwrap_or(base.volatility),
        spike_prob: args.spike_prob.unwrap_or(base.spike_prob),
        spike_scale: args.spike_scale.unwrap_or(base.spike_scale),
        shared_paths: args.shared_paths || base.shared_paths,
        ..base
    }
}

pub fn cmd_gen(args: &GenArgs) -> Result<Instance> {
    match args.preset.as_str() {
        "toy1" => Ok(preset("toy1", 1, args.seed)?),
        "default" | "unconstrained" | "tight" => Ok(generate(&gen_spec(args), args.seed)?),
        other => bail!("unknown preset {other:?} (expected toy1, default, unconstrained or tight)"),
    }
}

// ---- solve

/// One row of the design/cost table for a single periodic demand.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SolveReport {
    pub label: String,
    #[serde(with = "pde_core::num::serde_rational_vec")]
    pub alpha: Vec<Rational>,
    pub plan: CostBreakdown,
    /// The same design operated on observed demand.
    pub actual: Option<CostBreakdown>,
}

impl SolveReport {
    /// Paths built, design cost, design-problem flow cost, horizon flow cost,
    /// plan cost and, if known, plan cost on observed demand.
    pub fn cells(&self) -> Vec<String> {
        let paths = match self.plan.open_paths.as_slice() {
            [] => "none".to_string(),
            [one] => format!("Path {one}"),
            many => format!(
                "Paths {}",
                many.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",")
            ),
        };
        let f = num::format_rational;
        vec![
            paths,
            f(&self.plan.design_cost),
            f(&self.plan.mcnd_flow_cost),
            f(&self.plan.wmcnd_cost),
            f(&self.plan.c_pde),
            self.actual.as_ref().map_or("-".to_string(), |a| f(&a.c_pde)),
        ]
    }
}

/// What periodic demand to evaluate.
#[derive(Debug, Clone, PartialEq)]
pub enum Selection {
    Mapping(Mapping),
    /// One value for every commodity.
    Uniform(Rational),
    PerCommodity(Vec<Rational>),
}

pub fn solve_instance(inst: &Instance, selection: &Selection, require_actual: bool) -> Result<SolveReport> {
    let profile = DemandProfile::new(inst);
    let (label, alpha, y) = match selection {
        Selection::Mapping(m) => {
            let y = mapping(inst, *m);
            (m.name().to_string(), profile.alpha_of(&y), y)
        }
        Selection::Uniform(a) => {
            let dv = DeviationVector::uniform(inst, *a);
            let y = profile.to_demand(&dv.alpha);
            (format!("alpha={}", num::format_rational(a)), dv.alpha, y)
        }
        Selection::PerCommodity(values) => {
            if values.len() != inst.num_commodities() {
                bail!("--alpha has {} values but the instance has {} commodities", values.len(), inst.num_commodities());
            }
            let dv = DeviationVector::new(profile.bounds.clone(), values.clone());
            let y = profile.to_demand(&dv.alpha);
            ("alpha".to_string(), dv.alpha, y)
        }
    };
    if require_actual && inst.observed.is_none() {
        bail!("actual cost requested but the instance has no observed demand");
    }
    let plan = evaluate_cpde(inst, &y, &inst.forecasts)?;
    let actual = match &inst.observed {
        Some(obs) => Some(evaluate_cpde(inst, &y, obs)?),
        None => None,
    };
    Ok(SolveReport { label, alpha, plan, actual })
}

pub fn cmd_solve(args: &SolveArgs) -> Result<SolveReport> {
    let inst = load(&args.instance)?;
    let selection = match (&args.mapping, args.alpha.as_slice()) {
        (Some(m), _) => Selection::Mapping(*m),
        (None, []) => bail!("give --mapping or --alpha"),
        (None, [a]) => Selection::Uniform(*a),
        (None, many) => Selection::PerCommodity(many.to_vec()),
    };
    solve_instance(&inst, &selection, args.actual)
}

// ---- search

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchReport {
    pub mode: String,
    pub clustering: Option<Clustering>,
    pub dimension: usize,
    pub result: SearchResult,
    /// Plan cost of the result on observed demand, when available.
    #[serde(with = "pde_core::num::serde_rational_opt")]
    pub actual_cost: Option<Rational>,
    /// Per-mapping costs, for `enumerate` only.
    pub mappings: Vec<MappingRow>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MappingRow {
    pub mapping: Mapping,
    pub periodic_demand: Vec<u64>,
    #[serde(with = "pde_core::num::serde_rational")]
    pub cost: Rational,
    #[serde(with = "pde_core::num::serde_rational_opt")]
    pub actual_cost: Option<Rational>,
}

pub fn mapping_rows(inst: &Instance) -> Result<Vec<MappingRow>> {
    let plan = enumerate_mappings(&Evaluator::new(inst))?;
    let actual = match &inst.observed {
        Some(obs) => Some(enumerate_mappings(&Evaluator::on(inst, obs))?),
        None => None,
    };
    Ok(plan
        .iter()
        .enumerate()
        .map(|(i, m)| MappingRow {
            mapping: m.mapping,
            periodic_demand: m.breakdown.periodic_demand.clone(),
            cost: m.breakdown.c_pde,
            actual_cost: actual.as_ref().map(|a| a[i].breakdown.c_pde),
        })
        .collect())
}

/// Best of the four mappings, shaped like a search result.
fn enumerate_result(inst: &Instance, rows: &[MappingRow]) -> SearchResult {
    let profile = DemandProfile::new(inst);
    let best = rows
        .iter()
        .min_by(|a, b| a.cost.cmp(&b.cost))
        .expect("four mappings");
    let alpha = profile.alpha_of(&best.periodic_demand);
    SearchResult {
        algorithm: "enumerate".into(),
        best_alpha: alpha.clone(),
        commodity_alpha: alpha,
        best_demand: best.periodic_demand.clone(),
        best_cost: best.cost,
        initial_cost: rows[0].cost,
        evaluations_to_best: 1,
        evaluations: rows.len(),
        iterations: 1,
        trace: vec![TracePoint {
            iteration: 0,
            cost: best.cost,
        }],
        seed: 0,
    }
}

pub fn search_instance(inst: &Instance, config: &RunConfig) -> Result<SearchReport> {
    let space = build_space(inst, config.mode, config.clustering, config.clusters)?;
    let clustering = match space.mode() {
        SpaceMode::Clustered(c) => Some(c.clone()),
        _ => None,
    };
    let (result, mappings) = match config.params.algorithm(config.algo) {
        Some(algo) => (run(&space, &Evaluator::new(inst), &algo, config.seed)?, Vec::new()),
        None => {
            let rows = mapping_rows(inst)?;
            (enumerate_result(inst, &rows), rows)
        }
    };
    let actual_cost = match &inst.observed {
        Some(obs) => Some(evaluate_cpde(inst, &result.best_demand, obs)?.c_pde),
        None => None,
    };
    Ok(SearchReport {
        mode: space.mode().name().to_string(),
        clustering,
        dimension: space.dimension(),
        result,
        actual_cost,
        mappings,
    })
}

pub fn cmd_search(config: &RunConfig) -> Result<SearchReport> {
    let inst = load(&config.instance)?;
    search_instance(&inst, config)
}

// ---- cluster

pub fn cmd_cluster(args: &ClusterArgs) -> Result<Clustering> {
    let inst = load(&args.instance)?;
    build_clustering(&inst, args.clustering.into(), args.clusters)
}

// ---- bench

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BenchRow {
    pub label: String,
    #[serde(with = "pde_core::num::serde_rational")]
    pub cost: Rational,
    pub gap_pct: Option<i128>,
    pub evaluations_to_best: usize,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    /// Label of the cheapest row (first on ties).
    pub best: String,
}

impl BenchReport {
    pub fn row(&self, label: &str) -> Option<&BenchRow> {
        self.rows.iter().find(|r| r.label == label)
    }
}

enum Cell {
    Mapping(Mapping),
    Search {
        label: String,
        mode: ModeArg,
        clustering: Option<ClusterArg>,
        algo: AlgoArg,
        seed: u64,
    },
    Grid,
}

fn mode_label(mode: ModeArg, clustering: Option<ClusterArg>) -> String {
    match (mode, clustering) {
        (ModeArg::Scalar, _) => "scalar".into(),
        (ModeArg::Full, _) => "full".into(),
        (ModeArg::Clustered, Some(c)) => format!("{}", ClusterMethod::from(c)),
        (ModeArg::Clustered, None) => "clustered".into(),
    }
}

fn algo_label(algo: AlgoArg) -> &'static str {
    match algo {
        AlgoArg::Ns => "ns",
        AlgoArg::Nsdi => "nsdi",
        AlgoArg::Direct => "direct",
        AlgoArg::Enumerate => "enumerate",
    }
}

/// (label, cost, evaluations to best, evaluations)
fn run_cell(inst: &Instance, args: &BenchArgs, cell: &Cell) -> Result<(String, Rational, usize, usize)> {
    match cell {
        Cell::Mapping(m) => {
            let cost = Evaluator::new(inst).evaluate_demand(&mapping(inst, *m))?.c_pde;
            Ok((m.name().to_string(), cost, 1, 1))
        }
        Cell::Search {
            label,
            mode,
            clustering,
            algo,
            seed,
        } => {
            let config = RunConfig {
                instance: args.instance.clone(),
                mode: *mode,
                clustering: *clustering,
                clusters: args.clusters,
                algo: *algo,
                seed: *seed,
                params: args.params.clone(),
                out: None,
            };
            let r = search_instance(inst, &config)?.result;
            Ok((label.clone(), r.best_cost, r.evaluations_to_best, r.evaluations))
        }
        Cell::Grid => {
            for (name, space) in [("full", SearchSpace::full(inst)), ("scalar", SearchSpace::scalar(inst))] {
                let eval = Evaluator::new(inst);
                if let Ok((_, best)) = grid_optimum(&space, &eval, GRID_LIMIT) {
                    return Ok((format!("grid-{name}"), best.c_pde, eval.solves(), eval.solves()));
                }
            }
            bail!("too many reachable periodic demands for a grid")
        }
    }
}

pub fn bench_instance(inst: &Instance, args: &BenchArgs) -> Result<BenchReport> {
    let mut cells = Vec::new();
    if !args.no_mappings {
        cells.extend(Mapping::ALL.map(Cell::Mapping));
    }
    let multi_seed = args.seeds.len() > 1;
    for &mode in &args.modes {
        let clusterings: Vec<Option<ClusterArg>> = match mode {
            ModeArg::Clustered => args.clusterings.iter().copied().map(Some).collect(),
            _ => vec![None],
        };
        for clustering in clusterings {
            for &algo in &args.algos {
                // the pattern search ignores the seed
                let seeds: &[u64] = if algo == AlgoArg::Direct { &args.seeds[..1.min(args.seeds.len())] } else { &args.seeds };
                for &seed in seeds {
                    let mut label = format!("{}-{}", algo_label(algo), mode_label(mode, clustering));
                    if multi_seed && algo != AlgoArg::Direct {
                        label.push_str(&format!("-s{seed}"));
                    }
                    cells.push(Cell::Search {
                        label,
                        mode,
                        clustering,
                        algo,
                        seed,
                    });
                }
            }
        }
    }
    if args.grid {
        cells.push(Cell::Grid);
    }
    if cells.len() < 2 {
        bail!("a benchmark needs at least two cells");
    }
    let outcomes: Vec<(String, Rational, usize, usize)> =
        cells.par_iter().map(|c| run_cell(inst, args, c)).collect::<Result<_>>()?;
    let gaps = gap_table(&outcomes.iter().map(|(l, c, _, _)| (l.clone(), *c)).collect::<Vec<_>>());
    let rows: Vec<BenchRow> = outcomes
        .into_iter()
        .zip(gaps)
        .map(|((label, cost, to_best, total), g)| BenchRow {
            label,
            cost,
            gap_pct: g.gap_pct,
            evaluations_to_best: to_best,
            evaluations: total,
        })
        .collect();
    let best = rows
        .iter()
        .min_by(|a, b| a.cost.cmp(&b.cost))
        .map(|r| r.label.clone())
        .unwrap_or_default();
    Ok(BenchReport { rows, best })
}

pub fn cmd_bench(args: &BenchArgs) -> Result<BenchReport> {
    let inst = load(&args.instance)?;
    bench_instance(&inst, args)
}

// ---- report

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InstanceReport {
    pub profile: InstanceProfile,
    pub mappings: Vec<MappingRow>,
}

pub fn report_instance(inst: &Instance) -> Result<InstanceReport> {
    Ok(InstanceReport {
        profile: profile(inst)?,
        mappings: mapping_rows(inst)?,
    })
}

pub fn cmd_report(args: &ReportArgs) -> Result<InstanceReport> {
    report_instance(&load(&args.instance)?)
}

// ---- dispatch

/// Runs a parsed command line; returns the text printed on stdout.
pub fn execute(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Gen(args) => {
            let inst = cmd_gen(args)?;
            let text = save_instance(&inst);
            if let Some(dir) = &args.out {
                output::write_text(dir, "instance.json", &text)?;
            }
            Ok(text)
        }
        Command::Solve(args) => {
            let report = cmd_solve(args)?;
            if let Some(dir) = &args.out {
                write_json(dir, "solve.json", &report)?;
                output::write_solve_csv(dir, &report)?;
            }
            Ok(format!("{}\n{}", report.cells().join(" | "), output::to_json(&report)?))
        }
        Command::Search(config) => {
            let report = cmd_search(config)?;
            if let Some(dir) = &config.out {
                write_json(dir, "search.json", &report)?;
                write_csv(dir, "trace.csv", &report.result.trace)?;
                if !report.mappings.is_empty() {
                    output::write_mappings_csv(dir, &report.mappings)?;
                }
            }
            output::to_json(&report)
        }
        Command::Cluster(args) => {
            let clustering = cmd_cluster(args)?;
            if let Some(dir) = &args.out {
                write_json(dir, "clustering.json", &clustering)?;
            }
            output::to_json(&clustering)
        }
        Command::Bench(args) => {
            let report = cmd_bench(args)?;
            if let Some(dir) = &args.out {
                write_json(dir, "bench.json", &report)?;
                write_csv(dir, "bench.csv", &report.rows)?;
            }
            output::to_json(&report)
        }
        Command::Report(args) => {
            let report = cmd_report(args)?;
            if let Some(dir) = &args.out {
                write_json(dir, "report.json", &report)?;
                output::write_mappings_csv(dir, &report.mappings)?;
                output::write_profile_csv(dir, &report.profile)?;
            }
            output::to_json(&report)
        }
    }
}
