//! Exact lower-level solvers.
//!
//! For a fixed periodic demand the design problem (MCND) is solved by
//! branch-and-bound over regular paths; for a fixed design, each period's
//! flow problem is a bipartite min-cost flow
//! `source -> commodity (supply y_k) -> open path (capacity u_p) -> sink`.
//! Because outsourcing paths are always open and uncapacitated, any design is
//! feasible for any demand, so the two levels are evaluated one after the
//! other and the plan cost is `T * design_cost + sum of period flow costs`.

mod mcnd;
mod mincost;
pub mod oracle;

pub use mcnd::{solve_mcnd, McndSolution};
pub use mincost::{EdgeId, MinCostFlow};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DemandMatrix, Instance};
use crate::num::{self, Rational};

/// Open/closed status per path, indexed like `Instance::paths`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Design {
    pub open: Vec<bool>,
}

impl Design {
    /// Only outsourcing paths open.
    pub fn outsourcing_only(inst: &Instance) -> Self {
        Self {
            open: inst.paths.iter().map(|p| p.outsourcing).collect(),
        }
    }

    pub fn all_open(inst: &Instance) -> Self {
        Self {
            open: vec![true; inst.paths.len()],
        }
    }

    /// Opens the paths with the given ids plus every outsourcing path.
    pub fn with_paths(inst: &Instance, ids: &[usize]) -> Self {
        Self {
            open: inst
                .paths
                .iter()
                .map(|p| p.outsourcing || ids.contains(&p.id))
                .collect(),
        }
    }

    /// Ids of open regular paths, ascending.
    pub fn open_ids(&self, inst: &Instance) -> Vec<usize> {
        let mut ids: Vec<usize> = inst
            .paths
            .iter()
            .zip(&self.open)
            .filter(|(p, &open)| open && !p.outsourcing)
            .map(|(p, _)| p.id)
            .collect();
        ids.sort_unstable();
        ids
    }

    pub fn design_cost(&self, inst: &Instance) -> Rational {
        inst.paths
            .iter()
            .zip(&self.open)
            .filter(|(_, &open)| open)
            .fold(Rational::zero(), |acc, (p, _)| acc + p.design_cost)
    }

    pub fn is_subset_of(&self, other: &Design) -> bool {
        self.open.iter().zip(&other.open).all(|(&a, &b)| !a || b)
    }
}

/// Integral flow of one demand vector over a fixed design.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowSolution {
    /// `flows[p][i]` is the flow of commodity `paths[p].served_commodities[i]` on path `p`.
    pub flows: Vec<Vec<u64>>,
    /// Flow cost on regular paths.
    pub flow_cost: Rational,
    /// Flow cost on outsourcing paths.
    pub out_cost: Rational,
}

impl FlowSolution {
    pub fn total_cost(&self) -> Rational {
        self.flow_cost + self.out_cost
    }

    /// Total flow carried by path `p` (position in `Instance::paths`).
    pub fn load(&self, p: usize) -> u64 {
        self.flows[p].iter().sum()
    }

    /// Flow of `commodity` on path `p`.
    pub fn amount(&self, inst: &Instance, p: usize, commodity: usize) -> u64 {
        inst.paths[p]
            .served_commodities
            .iter()
            .zip(&self.flows[p])
            .filter(|(&k, _)| k == commodity)
            .map(|(_, &x)| x)
            .sum()
    }

    /// Amount delivered to each commodity over all paths.
    pub fn delivered(&self, inst: &Instance) -> Vec<u64> {
        let mut out = vec![0u64; inst.num_commodities()];
        for (p, path) in inst.paths.iter().enumerate() {
            for (&k, &x) in path.served_commodities.iter().zip(&self.flows[p]) {
                out[k] += x;
            }
        }
        out
    }
}

/// Minimum-cost integral flow of `demand` over `design`.
pub fn solve_flow(inst: &Instance, design: &Design, demand: &[u64]) -> Result<FlowSolution> {
    let k = inst.num_commodities();
    debug_assert_eq!(demand.len(), k);
    let total: i128 = demand.iter().map(|&d| d as i128).sum();
    let scale = num::common_denominator(inst.paths.iter().map(|p| &p.flow_cost));

    // ordered by id so that equal-cost ties favour low ids
    let mut open: Vec<usize> = (0..inst.paths.len()).filter(|&p| design.open[p]).collect();
    open.sort_by_key(|&p| inst.paths[p].id);

    let source = 0;
    let sink = 1 + k + open.len();
    let mut net = MinCostFlow::new(sink + 1);
    for (c, &d) in demand.iter().enumerate() {
        if d > 0 {
            net.add_edge(source, 1 + c, d as i128, 0);
        }
    }
    let mut arcs: Vec<(usize, usize, EdgeId)> = Vec::new();
    for (slot, &p) in open.iter().enumerate() {
        let path = &inst.paths[p];
        let node = 1 + k + slot;
        let unit = (path.flow_cost * scale).to_integer();
        for (i, &c) in path.served_commodities.iter().enumerate() {
            if c < k && demand[c] > 0 {
                let e = net.add_edge(1 + c, node, demand[c] as i128, unit);
                arcs.push((p, i, e));
            }
        }
        let cap = path.capacity.map_or(total, |u| (u as i128).min(total));
        net.add_edge(node, sink, cap, 0);
    }

    let (sent, _) = net.run(source, sink, total);
    let mut flows: Vec<Vec<u64>> = inst
        .paths
        .iter()
        .map(|p| vec![0; p.served_commodities.len()])
        .collect();
    for &(p, i, e) in &arcs {
        flows[p][i] = net.flow(e) as u64;
    }
    if sent < total {
        let sol = FlowSolution {
            flows,
            flow_cost: Rational::zero(),
            out_cost: Rational::zero(),
        };
        let delivered = sol.delivered(inst);
        let commodity = (0..k).find(|&c| delivered[c] < demand[c]).unwrap_or(0);
        return Err(Error::Infeasible { commodity });
    }

    let mut flow_cost = Rational::zero();
    let mut out_cost = Rational::zero();
    for (p, path) in inst.paths.iter().enumerate() {
        let load: u64 = flows[p].iter().sum();
        if load == 0 {
            continue;
        }
        let cost = path.flow_cost * Rational::from_integer(load as i128);
        if path.outsourcing {
            out_cost += cost;
        } else {
            flow_cost += cost;
        }
    }
    Ok(FlowSolution {
        flows,
        flow_cost,
        out_cost,
    })
}

/// One flow problem per period on the same design. Returns the period
/// solutions and their summed cost.
pub fn solve_wmcnd(
    inst: &Instance,
    design: &Design,
    demands: &DemandMatrix,
) -> Result<(Vec<FlowSolution>, Rational)> {
    let mut total = Rational::zero();
    let mut periods = Vec::with_capacity(demands.periods());
    for row in demands.rows() {
        let sol = solve_flow(inst, design, row)?;
        total += sol.total_cost();
        periods.push(sol);
    }
    Ok((periods, total))
}

/// Cost decomposition of one periodic demand, evaluated on one demand matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostBreakdown {
    /// Periodic demand the design was built for.
    pub periodic_demand: Vec<u64>,
    /// Ids of regular paths built.
    pub open_paths: Vec<usize>,
    #[serde(with = "crate::num::serde_rational")]
    pub design_cost: Rational,
    /// Flow plus outsourcing cost of the design problem.
    #[serde(with = "crate::num::serde_rational")]
    pub mcnd_flow_cost: Rational,
    #[serde(with = "crate::num::serde_rational")]
    pub wmcnd_cost: Rational,
    #[serde(with = "crate::num::serde_rational")]
    pub c_pde: Rational,
    #[serde(with = "crate::num::serde_rational_vec")]
    pub per_period: Vec<Rational>,
}

/// Builds the design for `periodic_demand`, then operates it on `demands`.
pub fn evaluate_cpde(
    inst: &Instance,
    periodic_demand: &[u64],
    demands: &DemandMatrix,
) -> Result<CostBreakdown> {
    let mcnd = solve_mcnd(inst, periodic_demand)?;
    operate(inst, periodic_demand, &mcnd, demands)
}

/// Prices an already-solved design against a demand matrix.
pub fn operate(
    inst: &Instance,
    periodic_demand: &[u64],
    mcnd: &McndSolution,
    demands: &DemandMatrix,
) -> Result<CostBreakdown> {
    let (periods, wmcnd_cost) = solve_wmcnd(inst, &mcnd.design, demands)?;
    let horizon = Rational::from_integer(demands.periods() as i128);
    Ok(CostBreakdown {
        periodic_demand: periodic_demand.to_vec(),
        open_paths: mcnd.design.open_ids(inst),
        design_cost: mcnd.design_cost,
        mcnd_flow_cost: mcnd.flow.total_cost(),
        wmcnd_cost,
        c_pde: horizon * mcnd.design_cost + wmcnd_cost,
        per_period: periods.iter().map(FlowSolution::total_cost).collect(),
    })
}
