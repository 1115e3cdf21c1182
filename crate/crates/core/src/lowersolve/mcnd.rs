use std::cmp::Ordering;

use super::{solve_flow, Design, FlowSolution};
use crate::error::Result;
use crate::model::Instance;
use crate::num::Rational;

/// Optimal design and flow for one periodic demand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct McndSolution {
    pub design: Design,
    pub flow: FlowSolution,
    pub design_cost: Rational,
    /// `design_cost + flow.total_cost()`.
    pub objective: Rational,
}

struct Incumbent {
    cost: Rational,
    /// Sorted ids of open regular paths; breaks cost ties.
    key: Vec<usize>,
    design: Design,
    flow: FlowSolution,
}

impl Incumbent {
    fn beaten_by(&self, cost: &Rational, key: &[usize]) -> bool {
        match cost.cmp(&self.cost) {
            Ordering::Less => true,
            Ordering::Equal => key < self.key.as_slice(),
            Ordering::Greater => false,
        }
    }
}

struct BranchAndBound<'a> {
    inst: &'a Instance,
    demand: &'a [u64],
    /// Branching order over candidate regular paths (positions in `inst.paths`).
    order: Vec<usize>,
    incumbent: Incumbent,
}

/// Exact design problem for a fixed periodic demand.
///
/// Depth-first branch-and-bound over the regular paths that serve some
/// commodity with positive demand, branching on high design costs first. A
/// node's bound is the design cost of its forced-open paths plus the optimal
/// flow with every undecided path open. Among equal-cost optima the one whose
/// sorted open-path ids are lexicographically smallest is returned.
pub fn solve_mcnd(inst: &Instance, demand: &[u64]) -> Result<McndSolution> {
    let mut order: Vec<usize> = inst
        .paths
        .iter()
        .enumerate()
        .filter(|(_, p)| {
            !p.outsourcing
                && p.served_commodities
                    .iter()
                    .any(|&k| demand.get(k).copied().unwrap_or(0) > 0)
        })
        .map(|(i, _)| i)
        .collect();
    order.sort_by(|&a, &b| {
        let (pa, pb) = (&inst.paths[a], &inst.paths[b]);
        pb.design_cost.cmp(&pa.design_cost).then(pa.id.cmp(&pb.id))
    });

    let mut all_open = Design::outsourcing_only(inst);
    for &p in &order {
        all_open.open[p] = true;
    }
    let flow = solve_flow(inst, &all_open, demand)?;
    let design_cost = all_open.design_cost(inst);
    let incumbent = Incumbent {
        cost: design_cost + flow.total_cost(),
        key: all_open.open_ids(inst),
        design: all_open,
        flow,
    };

    let mut bb = BranchAndBound {
        inst,
        demand,
        order,
        incumbent,
    };
    let mut forced = Design::outsourcing_only(inst);
    bb.explore(0, &mut forced)?;

    let Incumbent { design, flow, .. } = bb.incumbent;
    let design_cost = design.design_cost(inst);
    Ok(McndSolution {
        objective: design_cost + flow.total_cost(),
        design,
        flow,
        design_cost,
    })
}

impl BranchAndBound<'_> {
    /// `forced` holds the paths fixed open; paths in `order[depth..]` are undecided
    /// and all others are closed.
    fn explore(&mut self, depth: usize, forced: &mut Design) -> Result<()> {
        let inst = self.inst;
        let undecided = &self.order[depth..];

        let mut relaxed = forced.clone();
        for &p in undecided {
            relaxed.open[p] = true;
        }
        let flow = solve_flow(inst, &relaxed, self.demand)?;
        let forced_cost = forced.design_cost(inst);
        let bound = forced_cost + flow.total_cost();
        if bound > self.incumbent.cost {
            return Ok(());
        }

        // forced paths plus the undecided ones that carry flow form a feasible design
        let mut candidate = forced.clone();
        for &p in undecided {
            if flow.load(p) > 0 {
                candidate.open[p] = true;
            }
        }
        let candidate_cost = candidate.design_cost(inst) + flow.total_cost();
        let candidate_key = candidate.open_ids(inst);
        if self.incumbent.beaten_by(&candidate_cost, &candidate_key) {
            self.incumbent = Incumbent {
                cost: candidate_cost,
                key: candidate_key,
                design: candidate,
                flow: flow.clone(),
            };
        }

        if bound == self.incumbent.cost && self.best_key_below(forced, undecided) >= self.incumbent.key {
            return Ok(());
        }
        if depth == self.order.len() {
            return Ok(());
        }

        let p = self.order[depth];
        let open_first = flow.load(p) > 0;
        for open in [open_first, !open_first] {
            forced.open[p] = open;
            self.explore(depth + 1, forced)?;
        }
        forced.open[p] = false;
        Ok(())
    }

    /// Smallest tie-break key reachable below a node: the forced ids plus
    /// every undecided id smaller than the largest forced id.
    fn best_key_below(&self, forced: &Design, undecided: &[usize]) -> Vec<usize> {
        let inst = self.inst;
        let mut key = forced.open_ids(inst);
        let Some(&largest) = key.last() else {
            return key;
        };
        key.extend(
            undecided
                .iter()
                .map(|&p| inst.paths[p].id)
                .filter(|&id| id < largest),
        );
        key.sort_unstable();
        key
    }
}

impl McndSolution {
    /// Whether the flow of `commodity` uses an outsourcing path.
    pub fn outsources(&self, inst: &Instance, commodity: usize) -> bool {
        inst.paths
            .iter()
            .enumerate()
            .any(|(p, path)| path.outsourcing && self.flow.amount(inst, p, commodity) > 0)
    }
}
