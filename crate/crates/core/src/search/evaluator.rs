use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use rayon::prelude::*;

use super::SearchSpace;
use crate::error::Result;
use crate::lowersolve::{evaluate_cpde, CostBreakdown};
use crate::model::{DemandMatrix, Instance};
use crate::num::Rational;

type Slot = Arc<Mutex<Option<CostBreakdown>>>;

/// Memoized plan-cost evaluation keyed by the rounded periodic demand.
///
/// Alpha points that round to the same periodic demand share one lower-level
/// solve. The counter counts distinct solves, including under concurrent use:
/// each key owns a slot whose lock is held while it is being computed.
pub struct Evaluator<'a> {
    inst: &'a Instance,
    demands: &'a DemandMatrix,
    memo: Mutex<HashMap<Vec<u64>, Slot>>,
    solves: AtomicUsize,
    visited: Option<Mutex<Vec<Vec<Rational>>>>,
}

impl<'a> Evaluator<'a> {
    /// Evaluates on the instance forecasts.
    pub fn new(inst: &'a Instance) -> Self {
        Self::on(inst, &inst.forecasts)
    }

    /// Evaluates on an arbitrary demand matrix, e.g. observed demand.
    pub fn on(inst: &'a Instance, demands: &'a DemandMatrix) -> Self {
        Self {
            inst,
            demands,
            memo: Mutex::new(HashMap::new()),
            solves: AtomicUsize::new(0),
            visited: None,
        }
    }

    /// Also keep every alpha point passed to [`Evaluator::evaluate_point`].
    pub fn recording(mut self) -> Self {
        self.visited = Some(Mutex::new(Vec::new()));
        self
    }

    pub fn instance(&self) -> &Instance {
        self.inst
    }

    /// Number of distinct lower-level solves so far.
    pub fn solves(&self) -> usize {
        self.solves.load(Ordering::SeqCst)
    }

    pub fn visited(&self) -> Vec<Vec<Rational>> {
        self.visited
            .as_ref()
            .map(|v| v.lock().unwrap().clone())
            .unwrap_or_default()
    }

    pub fn evaluate_demand(&self, demand: &[u64]) -> Result<CostBreakdown> {
        let slot = {
            let mut memo = self.memo.lock().unwrap();
            memo.entry(demand.to_vec()).or_default().clone()
        };
        let mut guard = slot.lock().unwrap();
        if let Some(hit) = guard.as_ref() {
            return Ok(hit.clone());
        }
        let fresh = evaluate_cpde(self.inst, demand, self.demands)?;
        self.solves.fetch_add(1, Ordering::SeqCst);
        *guard = Some(fresh.clone());
        Ok(fresh)
    }

    pub fn evaluate_point(&self, space: &SearchSpace, point: &[Rational]) -> Result<CostBreakdown> {
        if let Some(log) = &self.visited {
            log.lock().unwrap().push(point.to_vec());
        }
        self.evaluate_demand(&space.to_demand(point))
    }

    /// Plan cost of each point, evaluated in parallel, in input order.
    pub fn evaluate_batch(&self, space: &SearchSpace, points: &[Vec<Rational>]) -> Result<Vec<Rational>> {
        points
            .par_iter()
            .map(|p| self.evaluate_point(space, p).map(|b| b.c_pde))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::toy1;
    use crate::num::{int, ratio};

    #[test]
    fn same_rounded_demand_is_solved_once() {
        let inst = toy1();
        let space = SearchSpace::scalar(&inst);
        let eval = Evaluator::new(&inst);
        let a = eval.evaluate_point(&space, &[ratio(3, 2)]).unwrap();
        let b = eval.evaluate_point(&space, &[ratio(13, 10)]).unwrap();
        assert_eq!(a, b);
        assert_eq!(eval.solves(), 1);
        assert_eq!(a, evaluate_cpde(&inst, &[3], &inst.forecasts).unwrap());
    }

    #[test]
    fn concurrent_duplicates_count_once() {
        let inst = toy1();
        let space = SearchSpace::scalar(&inst);
        let eval = Evaluator::new(&inst);
        let points: Vec<Vec<Rational>> = (0..64).map(|i| vec![ratio(i % 5, 2)]).collect();
        let costs = eval.evaluate_batch(&space, &points).unwrap();
        assert_eq!(costs.len(), 64);
        // alphas 0, 0.5, 1, 1.5, 2 give demands 0..=4
        assert_eq!(eval.solves(), 5);
        assert_eq!(costs[2], int(300));
    }
}
