//! Exhaustive reference solvers for verification on tiny instances.
//!
//! Neither function shares code with the branch-and-bound or the min-cost
//! flow beyond `solve_flow` being used per design by [`oracle_mcnd`]; the flow
//! solver itself is checked against [`oracle_flow`].

use num_traits::Zero;

use super::{solve_flow, Design};
use crate::error::{Error, Result};
use crate::model::Instance;
use crate::num::Rational;

pub const ORACLE_MAX_PATHS: usize = 12;
pub const ORACLE_MAX_DEMAND: u64 = 50;
pub const ORACLE_FLOW_MAX_PATHS: usize = 6;

/// Minimum design-problem objective over all `2^n` designs of the regular paths.
pub fn oracle_mcnd(inst: &Instance, demand: &[u64]) -> Result<Rational> {
    let regular: Vec<usize> = (0..inst.paths.len())
        .filter(|&p| !inst.paths[p].outsourcing)
        .collect();
    let total: u64 = demand.iter().sum();
    if regular.len() > ORACLE_MAX_PATHS || total > ORACLE_MAX_DEMAND {
        return Err(Error::OracleCap(format!(
            "{} regular paths, total demand {total}",
            regular.len()
        )));
    }
    let mut best: Option<Rational> = None;
    for mask in 0u32..(1 << regular.len()) {
        let mut design = Design::outsourcing_only(inst);
        for (bit, &p) in regular.iter().enumerate() {
            design.open[p] = mask & (1 << bit) != 0;
        }
        let cost = design.design_cost(inst) + solve_flow(inst, &design, demand)?.total_cost();
        if best.map_or(true, |b| cost < b) {
            best = Some(cost);
        }
    }
    Ok(best.unwrap_or_else(Rational::zero))
}

/// Minimum flow cost by enumerating every integral split of every
/// commodity's demand over its open paths.
pub fn oracle_flow(inst: &Instance, design: &Design, demand: &[u64]) -> Result<Rational> {
    let open: Vec<usize> = (0..inst.paths.len()).filter(|&p| design.open[p]).collect();
    let total: u64 = demand.iter().sum();
    if open.len() > ORACLE_FLOW_MAX_PATHS || total > ORACLE_MAX_DEMAND {
        return Err(Error::OracleCap(format!(
            "{} open paths, total demand {total}",
            open.len()
        )));
    }
    let mut residual: Vec<u64> = inst
        .paths
        .iter()
        .map(|p| p.capacity.unwrap_or(total))
        .collect();
    let mut best = None;
    split_commodity(inst, &open, demand, 0, &mut residual, Rational::zero(), &mut best);
    best.ok_or(Error::Infeasible {
        commodity: demand.iter().position(|&d| d > 0).unwrap_or(0),
    })
}

fn split_commodity(
    inst: &Instance,
    open: &[usize],
    demand: &[u64],
    commodity: usize,
    residual: &mut [u64],
    cost: Rational,
    best: &mut Option<Rational>,
) {
    if commodity == demand.len() {
        if best.map_or(true, |b| cost < b) {
            *best = Some(cost);
        }
        return;
    }
    let serving: Vec<usize> = open
        .iter()
        .copied()
        .filter(|&p| inst.paths[p].serves(commodity))
        .collect();
    split_units(inst, open, demand, commodity, &serving, 0, demand[commodity], residual, cost, best);
}

#[allow(clippy::too_many_arguments)]
fn split_units(
    inst: &Instance,
    open: &[usize],
    demand: &[u64],
    commodity: usize,
    serving: &[usize],
    slot: usize,
    remaining: u64,
    residual: &mut [u64],
    cost: Rational,
    best: &mut Option<Rational>,
) {
    if remaining == 0 {
        split_commodity(inst, open, demand, commodity + 1, residual, cost, best);
        return;
    }
    if slot == serving.len() {
        return;
    }
    let p = serving[slot];
    let most = remaining.min(residual[p]);
    for amount in 0..=most {
        residual[p] -= amount;
        let added = inst.paths[p].flow_cost * Rational::from_integer(amount as i128);
        split_units(
            inst,
            open,
            demand,
            commodity,
            serving,
            slot + 1,
            remaining - amount,
            residual,
            cost + added,
            best,
        );
        residual[p] += amount;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::toy1;
    use crate::num::int;

    #[test]
    fn oracle_values_on_illustration() {
        let inst = toy1();
        assert_eq!(oracle_mcnd(&inst, &[3]).unwrap(), int(40));
        assert_eq!(oracle_mcnd(&inst, &[0]).unwrap(), int(0));
        assert_eq!(oracle_mcnd(&inst, &[2]).unwrap(), int(20));
        // {P1, P3}: design 30, flow 2*5 + 2*10
        assert_eq!(oracle_mcnd(&inst, &[4]).unwrap(), int(60));
    }

    #[test]
    fn oracle_flow_on_illustration() {
        let inst = toy1();
        assert_eq!(oracle_flow(&inst, &Design::all_open(&inst), &[4]).unwrap(), int(30));
        assert_eq!(oracle_flow(&inst, &Design::with_paths(&inst, &[1]), &[4]).unwrap(), int(110));
    }

    #[test]
    fn refuses_large_inputs() {
        let inst = toy1();
        assert!(matches!(oracle_mcnd(&inst, &[51]), Err(Error::OracleCap(_))));
    }
}
