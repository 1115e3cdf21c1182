//! Upper-level search over deviation coefficients.

mod direct;
mod evaluator;
mod grid;
mod mappings;
mod neighborhood;
mod ns;
mod space;

pub use direct::{direct_search, run_optimizer, BlackBoxOptimizer, DirectParams, PatternSearch};
pub use evaluator::Evaluator;
pub use grid::{grid_optimum, grid_points, GRID_LIMIT};
pub use mappings::{enumerate_mappings, MappingCost};
pub use neighborhood::{gaussian, neighborhood, NEIGHBOR_GRID};
pub use ns::{ns, nsdi, NsParams, NsdiParams};
pub use space::{SearchSpace, SpaceMode};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::num::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TracePoint {
    pub iteration: usize,
    /// Incumbent cost after this iteration.
    #[serde(with = "crate::num::serde_rational")]
    pub cost: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchResult {
    pub algorithm: String,
    /// Incumbent in search-space coordinates.
    #[serde(with = "crate::num::serde_rational_vec")]
    pub best_alpha: Vec<Rational>,
    /// Incumbent broadcast to commodities.
    #[serde(with = "crate::num::serde_rational_vec")]
    pub commodity_alpha: Vec<Rational>,
    pub best_demand: Vec<u64>,
    #[serde(with = "crate::num::serde_rational")]
    pub best_cost: Rational,
    #[serde(with = "crate::num::serde_rational")]
    pub initial_cost: Rational,
    /// Lower-level solves performed when the incumbent was last improved;
    /// 1 when the starting point is never beaten.
    pub evaluations_to_best: usize,
    /// Lower-level solves performed in total.
    pub evaluations: usize,
    pub iterations: usize,
    pub trace: Vec<TracePoint>,
    pub seed: u64,
}

/// Which upper-level algorithm to run, with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Algorithm {
    Ns(NsParams),
    Nsdi(NsdiParams),
    Direct(DirectParams),
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Ns(_) => "ns",
            Algorithm::Nsdi(_) => "nsdi",
            Algorithm::Direct(_) => "direct",
        }
    }
}

/// Runs `algorithm` from the all-ones point of `space`.
pub fn run(space: &SearchSpace, evaluator: &Evaluator, algorithm: &Algorithm, seed: u64) -> Result<SearchResult> {
    let start = space.ones();
    match algorithm {
        Algorithm::Ns(p) => ns(space, evaluator, &start, p, seed),
        Algorithm::Nsdi(p) => nsdi(space, evaluator, &start, p, seed),
        Algorithm::Direct(p) => direct_search(space, evaluator, &start, p),
    }
}

/// Incumbent bookkeeping shared by the algorithms.
struct Tracker<'s, 'e, 'a> {
    space: &'s SearchSpace,
    evaluator: &'e Evaluator<'a>,
    base: usize,
    best: Vec<Rational>,
    best_cost: Rational,
    initial_cost: Rational,
    evaluations_to_best: usize,
    trace: Vec<TracePoint>,
}

impl<'s, 'e, 'a> Tracker<'s, 'e, 'a> {
    fn start(space: &'s SearchSpace, evaluator: &'e Evaluator<'a>, alpha0: &[Rational]) -> Result<Self> {
        let base = evaluator.solves();
        let cost = evaluator.evaluate_point(space, alpha0)?.c_pde;
        Ok(Self {
            space,
            evaluator,
            base,
            best: alpha0.to_vec(),
            best_cost: cost,
            initial_cost: cost,
            evaluations_to_best: 1,
            trace: vec![TracePoint { iteration: 0, cost }],
        })
    }

    fn spent(&self) -> usize {
        self.evaluator.solves() - self.base
    }

    /// Takes `point` if strictly better; returns whether it did.
    fn offer(&mut self, point: &[Rational], cost: Rational) -> bool {
        if cost < self.best_cost {
            self.best = point.to_vec();
            self.best_cost = cost;
            self.evaluations_to_best = self.spent().max(1);
            true
        } else {
            false
        }
    }

    fn record(&mut self, iteration: usize) {
        self.trace.push(TracePoint {
            iteration,
            cost: self.best_cost,
        });
    }

    fn finish(self, algorithm: &str, iterations: usize, seed: u64) -> SearchResult {
        let deviation = self.space.to_deviation(&self.best);
        let evaluations = self.spent().max(1);
        SearchResult {
            algorithm: algorithm.to_string(),
            best_demand: self.space.profile().to_demand(&deviation.alpha),
            commodity_alpha: deviation.alpha,
            best_alpha: self.best,
            best_cost: self.best_cost,
            initial_cost: self.initial_cost,
            evaluations_to_best: self.evaluations_to_best,
            evaluations,
            iterations,
            trace: self.trace,
            seed,
        }
    }
}

/// Index of the smallest cost; the first one on ties.
fn argmin(costs: &[Rational]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, c) in costs.iter().enumerate() {
        if best.map_or(true, |b| *c < costs[b]) {
            best = Some(i);
        }
    }
    best
}
