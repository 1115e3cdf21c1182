use serde::{Deserialize, Serialize};

use super::{Evaluator, SearchResult, SearchSpace, Tracker};
use crate::error::{Error, Result};
use crate::num::{self, Rational};

/// Ask/tell contract for derivative-free optimizers over a box.
///
/// The driver evaluates every point returned by `ask` (after clamping into
/// the bounds) and passes the costs back in the same order through `tell`.
/// Returning `None` from `ask` ends the run.
pub trait BlackBoxOptimizer {
    fn name(&self) -> &str;

    fn initialize(
        &mut self,
        bounds: &[(Rational, Rational)],
        start: &[Rational],
        start_cost: Rational,
        seed: u64,
    );

    fn ask(&mut self) -> Option<Vec<Vec<Rational>>>;

    fn tell(&mut self, costs: &[Rational]);
}

/// Drives `optimizer` until it stops or `budget` lower-level solves are spent.
pub fn run_optimizer(
    space: &SearchSpace,
    evaluator: &Evaluator,
    optimizer: &mut dyn BlackBoxOptimizer,
    alpha0: &[Rational],
    budget: usize,
    seed: u64,
) -> Result<SearchResult> {
    if !space.contains(alpha0) {
        return Err(Error::Parameter("starting point is outside the search bounds".into()));
    }
    let mut tracker = Tracker::start(space, evaluator, alpha0)?;
    optimizer.initialize(space.bounds(), alpha0, tracker.best_cost, seed);
    let mut iteration = 0;
    while tracker.spent() < budget {
        let Some(points) = optimizer.ask() else { break };
        iteration += 1;
        let points: Vec<Vec<Rational>> = points.into_iter().map(|p| space.clamp(p)).collect();
        let costs = evaluator.evaluate_batch(space, &points)?;
        for (p, c) in points.iter().zip(&costs) {
            tracker.offer(p, *c);
        }
        optimizer.tell(&costs);
        tracker.record(iteration);
    }
    let name = optimizer.name().to_string();
    Ok(tracker.finish(&name, iteration, seed))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectParams {
    #[serde(with = "crate::num::serde_rational")]
    pub initial_step: Rational,
    #[serde(with = "crate::num::serde_rational")]
    pub min_step: Rational,
    /// Maximum number of lower-level solves.
    pub budget: usize,
}

impl Default for DirectParams {
    fn default() -> Self {
        Self {
            initial_step: num::ratio(1, 2),
            min_step: num::ratio(1, 100),
            budget: 1000,
        }
    }
}

/// Coordinate pattern search.
///
/// Polls `+step` then `-step` along each coordinate in turn, one point per
/// ask, and moves on the first strict improvement. A full poll without
/// improvement halves the step. Stops once the step drops below `min_step`.
#[derive(Debug, Clone)]
pub struct PatternSearch {
    min_step: Rational,
    step: Rational,
    bounds: Vec<(Rational, Rational)>,
    center: Vec<Rational>,
    center_cost: Rational,
    /// Next poll direction: coordinate `cursor / 2`, sign from parity.
    cursor: usize,
    pending: Option<Vec<Rational>>,
}

impl PatternSearch {
    pub fn new(initial_step: Rational, min_step: Rational) -> Self {
        Self {
            min_step,
            step: initial_step,
            bounds: Vec::new(),
            center: Vec::new(),
            center_cost: Rational::from_integer(0),
            cursor: 0,
            pending: None,
        }
    }

    pub fn step(&self) -> Rational {
        self.step
    }

    fn poll_point(&self, direction: usize) -> Vec<Rational> {
        let dim = direction / 2;
        let mut p = self.center.clone();
        let (lo, hi) = &self.bounds[dim];
        let moved = if direction % 2 == 0 { p[dim] + self.step } else { p[dim] - self.step };
        p[dim] = num::clamp(moved, lo, hi);
        p
    }
}

impl BlackBoxOptimizer for PatternSearch {
    fn name(&self) -> &str {
        "direct"
    }

    fn initialize(&mut self, bounds: &[(Rational, Rational)], start: &[Rational], start_cost: Rational, _seed: u64) {
        self.bounds = bounds.to_vec();
        self.center = start.to_vec();
        self.center_cost = start_cost;
        self.cursor = 0;
        self.pending = None;
    }

    fn ask(&mut self) -> Option<Vec<Vec<Rational>>> {
        let directions = 2 * self.center.len();
        loop {
            if self.step < self.min_step || directions == 0 {
                return None;
            }
            while self.cursor < directions {
                let p = self.poll_point(self.cursor);
                self.cursor += 1;
                // clamped back onto the center
                if p != self.center {
                    self.pending = Some(p.clone());
                    return Some(vec![p]);
                }
            }
            self.step /= Rational::from_integer(2);
            self.cursor = 0;
        }
    }

    fn tell(&mut self, costs: &[Rational]) {
        let Some(p) = self.pending.take() else { return };
        if let Some(&c) = costs.first() {
            if c < self.center_cost {
                self.center = p;
                self.center_cost = c;
                self.cursor = 0;
            }
        }
    }
}

pub fn direct_search(
    space: &SearchSpace,
    evaluator: &Evaluator,
    alpha0: &[Rational],
    params: &DirectParams,
) -> Result<SearchResult> {
    if !(params.initial_step > params.min_step && params.min_step > Rational::from_integer(0)) {
        return Err(Error::Parameter("need initial_step > min_step > 0".into()));
    }
    let mut opt = PatternSearch::new(params.initial_step, params.min_step);
    run_optimizer(space, evaluator, &mut opt, alpha0, params.budget, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::{sharing, toy1};
    use crate::model::DemandMatrix;
    use crate::num::{int, ratio};

    #[test]
    fn illustration_scalar() {
        let inst = toy1();
        let space = SearchSpace::scalar(&inst);
        let eval = Evaluator::new(&inst);
        let r = direct_search(&space, &eval, &[int(1)], &DirectParams::default()).unwrap();
        // y = 4 (alpha 2) is the cheapest plan on these forecasts
        assert_eq!(r.best_cost, int(260));
        assert_eq!(r.best_demand, vec![4]);
        assert_eq!(r.initial_cost, int(300));
        assert!(r.trace.iter().any(|t| t.cost == int(280)));
    }

    #[test]
    fn zero_dimensional() {
        let mut inst = toy1();
        inst.forecasts = DemandMatrix::from_series(&[0, 0, 0]);
        inst.observed = None;
        let space = SearchSpace::full(&inst);
        let eval = Evaluator::new(&inst);
        let r = direct_search(&space, &eval, &[], &DirectParams::default()).unwrap();
        assert_eq!(r.evaluations, 1);
        assert!(r.best_alpha.is_empty());
    }

    #[test]
    fn budget_of_one() {
        let inst = toy1();
        let space = SearchSpace::scalar(&inst);
        let eval = Evaluator::new(&inst);
        let params = DirectParams {
            budget: 1,
            ..DirectParams::default()
        };
        let r = direct_search(&space, &eval, &[int(1)], &params).unwrap();
        assert_eq!(r.best_cost, int(300));
        assert_eq!(r.evaluations, 1);
    }

    #[test]
    fn step_halves_to_minimum() {
        let mut opt = PatternSearch::new(ratio(1, 2), ratio(1, 10));
        opt.initialize(&[(int(0), int(1))], &[int(0)], int(5), 0);
        let mut asked = 0;
        while let Some(points) = opt.ask() {
            asked += points.len();
            opt.tell(&vec![int(9); points.len()]);
        }
        // steps 1/2, 1/4, 1/8; only the + direction is inside the box at 0
        assert_eq!(asked, 3);
        assert_eq!(opt.step(), ratio(1, 16));
    }

    #[test]
    fn full_space_respects_bounds() {
        let inst = sharing();
        let space = SearchSpace::full(&inst);
        let eval = Evaluator::new(&inst).recording();
        let r = direct_search(&space, &eval, &space.ones(), &DirectParams::default()).unwrap();
        assert!(r.best_cost <= r.initial_cost);
        assert!(eval.visited().iter().all(|p| space.contains(p)));
        assert!(r.trace.windows(2).all(|w| w[1].cost <= w[0].cost));
    }

    #[test]
    fn rejects_bad_steps() {
        let inst = toy1();
        let space = SearchSpace::scalar(&inst);
        let eval = Evaluator::new(&inst);
        let params = DirectParams {
            initial_step: ratio(1, 100),
            min_step: ratio(1, 10),
            budget: 10,
        };
        assert!(direct_search(&space, &eval, &[int(1)], &params).is_err());
    }
}
