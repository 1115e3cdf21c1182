use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{argmin, neighborhood, Evaluator, SearchResult, SearchSpace, Tracker};
use crate::error::{Error, Result};
use crate::num::Rational;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NsParams {
    pub beta: f64,
    /// Neighborhood size `V`.
    pub neighbors: usize,
}

impl Default for NsParams {
    fn default() -> Self {
        Self {
            beta: 0.05,
            neighbors: 15,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NsdiParams {
    pub beta: f64,
    /// Initial neighborhood size `V`.
    pub neighbors: usize,
    /// `M`: consecutive non-improving iterations before stopping.
    pub max_stall: usize,
    pub b_minus: f64,
    pub b_plus: f64,
    pub v_plus: f64,
    /// Hard ceiling on `V` as it grows.
    pub max_neighbors: usize,
}

impl Default for NsdiParams {
    fn default() -> Self {
        Self {
            beta: 0.05,
            neighbors: 15,
            max_stall: 15,
            b_minus: 0.7,
            b_plus: 1.3,
            v_plus: 1.1,
            max_neighbors: 4096,
        }
    }
}

impl NsdiParams {
    /// Smaller neighborhoods and patience, for instances with many commodities.
    pub fn large() -> Self {
        Self {
            beta: 0.02,
            neighbors: 10,
            max_stall: 7,
            ..Self::default()
        }
    }

    fn check(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Parameter(m.to_string()));
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return bad("beta must be finite and nonnegative");
        }
        if self.neighbors == 0 || self.max_neighbors < self.neighbors {
            return bad("V must be at least 1 and at most max_neighbors");
        }
        if self.max_stall == 0 {
            return bad("M must be at least 1");
        }
        if !(0.0 < self.b_minus && self.b_minus < 1.0 && 1.0 < self.b_plus && self.b_plus.is_finite()) {
            return bad("need 0 < b_minus < 1 < b_plus");
        }
        if !(self.v_plus > 1.0 && self.v_plus.is_finite()) {
            return bad("v_plus must exceed 1");
        }
        Ok(())
    }
}

fn check_start(space: &SearchSpace, alpha0: &[Rational]) -> Result<()> {
    if space.contains(alpha0) {
        Ok(())
    } else {
        Err(Error::Parameter("starting point is outside the search bounds".into()))
    }
}

/// Neighborhood search: move to the best neighbor while it strictly improves.
pub fn ns(
    space: &SearchSpace,
    evaluator: &Evaluator,
    alpha0: &[Rational],
    params: &NsParams,
    seed: u64,
) -> Result<SearchResult> {
    check_start(space, alpha0)?;
    if !(params.beta >= 0.0 && params.beta.is_finite()) || params.neighbors == 0 {
        return Err(Error::Parameter("need beta >= 0 and V >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tracker = Tracker::start(space, evaluator, alpha0)?;
    let mut iteration = 0;
    loop {
        iteration += 1;
        let current = tracker.best.clone();
        let points = neighborhood(space, &current, params.beta, params.neighbors, &mut rng);
        let costs = evaluator.evaluate_batch(space, &points)?;
        let moved = match argmin(&costs) {
            Some(i) => tracker.offer(&points[i], costs[i]),
            None => false,
        };
        tracker.record(iteration);
        if !moved {
            break;
        }
    }
    Ok(tracker.finish("ns", iteration, seed))
}

/// Neighborhood search with diversification and intensification.
///
/// The current point always moves to the best neighbor; the incumbent only
/// on strict improvement. Stops after `M` consecutive iterations without one.
pub fn nsdi(
    space: &SearchSpace,
    evaluator: &Evaluator,
    alpha0: &[Rational],
    params: &NsdiParams,
    seed: u64,
) -> Result<SearchResult> {
    check_start(space, alpha0)?;
    params.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tracker = Tracker::start(space, evaluator, alpha0)?;
    let mut current = alpha0.to_vec();
    let mut beta = params.beta;
    let mut count = params.neighbors;
    let mut stall = 0;
    let mut iteration = 0;
    while stall < params.max_stall {
        iteration += 1;
        let mut points = neighborhood(space, &current, beta, count, &mut rng);
        let costs = evaluator.evaluate_batch(space, &points)?;
        let Some(i) = argmin(&costs) else { break };
        if tracker.offer(&points[i], costs[i]) {
            stall = 0;
            beta *= params.b_minus;
        } else {
            stall += 1;
            beta *= params.b_plus;
            count = ((params.v_plus * count as f64).ceil() as usize).min(params.max_neighbors);
        }
        current = points.swap_remove(i);
        tracker.record(iteration);
    }
    Ok(tracker.finish("nsdi", iteration, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::{sharing, toy1};
    use crate::num::int;

    #[test]
    fn ns_zero_beta_stops_at_once() {
        let inst = toy1();
        let space = SearchSpace::scalar(&inst);
        let eval = Evaluator::new(&inst);
        let p = NsParams { beta: 0.0, neighbors: 5 };
        let r = ns(&space, &eval, &[int(1)], &p, 1).unwrap();
        assert_eq!(r.iterations, 1);
        assert_eq!(r.best_cost, int(300));
        assert_eq!(r.evaluations_to_best, 1);
        assert_eq!(r.evaluations, 1);
    }

    #[test]
    fn nsdi_single_stall_zero_beta() {
        let inst = toy1();
        let space = SearchSpace::scalar(&inst);
        let eval = Evaluator::new(&inst);
        let p = NsdiParams {
            beta: 0.0,
            max_stall: 1,
            ..NsdiParams::default()
        };
        let r = nsdi(&space, &eval, &[int(1)], &p, 1).unwrap();
        assert_eq!(r.iterations, 1);
        assert_eq!(r.best_cost, int(300));
    }

    #[test]
    fn ns_never_worse_than_start() {
        let inst = toy1();
        let space = SearchSpace::scalar(&inst);
        for seed in 0..20 {
            let eval = Evaluator::new(&inst);
            let r = ns(&space, &eval, &[int(1)], &NsParams::default(), seed).unwrap();
            assert!(r.best_cost <= int(300));
        }
    }

    #[test]
    fn nsdi_trace_and_stall() {
        let inst = sharing();
        let space = SearchSpace::full(&inst);
        let params = NsdiParams::default();
        let eval = Evaluator::new(&inst).recording();
        let r = nsdi(&space, &eval, &space.ones(), &params, 5).unwrap();
        assert!(r.trace.windows(2).all(|w| w[1].cost <= w[0].cost));
        let tail = r.trace.iter().rev().take_while(|t| t.cost == r.best_cost).count() - 1;
        assert_eq!(tail, params.max_stall);
        assert!(eval.visited().iter().all(|p| space.contains(p)));
        let again = nsdi(&space, &Evaluator::new(&inst), &space.ones(), &params, 5).unwrap();
        assert_eq!(r, again);
    }

    #[test]
    fn seeded_golden_runs() {
        let inst = toy1();
        let space = SearchSpace::scalar(&inst);
        let r = ns(&space, &Evaluator::new(&inst), &[int(1)], &NsParams::default(), 42).unwrap();
        assert_eq!(r.best_cost, int(GOLDEN_NS_42));
        let r = nsdi(&space, &Evaluator::new(&inst), &[int(1)], &NsdiParams::default(), 42).unwrap();
        assert_eq!(r.best_cost, int(GOLDEN_NSDI_42));
        let costs: Vec<i128> = r.trace.iter().map(|t| t.cost.to_integer()).collect();
        assert_eq!(costs, GOLDEN_NSDI_42_TRACE);
    }

    const GOLDEN_NS_42: i128 = 280;
    const GOLDEN_NSDI_42: i128 = 260;
    const GOLDEN_NSDI_42_TRACE: &[i128] = &[
        300, 280, 280, 260, 260, 260, 260, 260, 260, 260, 260, 260, 260, 260, 260, 260, 260, 260, 260,
    ];

    #[test]
    fn rejects_bad_parameters() {
        let inst = toy1();
        let space = SearchSpace::scalar(&inst);
        let eval = Evaluator::new(&inst);
        let p = NsdiParams {
            b_minus: 1.2,
            ..NsdiParams::default()
        };
        assert!(nsdi(&space, &eval, &[int(1)], &p, 0).is_err());
        assert!(ns(&space, &eval, &[int(5)], &NsParams::default(), 0).is_err());
    }
}
