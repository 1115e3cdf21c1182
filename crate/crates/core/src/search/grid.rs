//! Exhaustive enumeration of every periodic demand a space can reach.

use num_traits::Zero;

use super::{argmin, Evaluator, SearchSpace};
use crate::error::{Error, Result};
use crate::lowersolve::CostBreakdown;
use crate::num::{self, Rational};

pub const GRID_LIMIT: usize = 10_000;

/// One value per distinct demand pattern of the coordinate's members.
///
/// Demands are piecewise constant in the coordinate, jumping only where some
/// member's `alpha * mean` crosses a half-integer, so the lower bound plus
/// those crossings cover every pattern.
fn axis(space: &SearchSpace, dim: usize) -> Vec<Rational> {
    let (lo, hi) = space.bounds()[dim];
    let profile = space.profile();
    let members = space.members(dim);
    let half = num::ratio(1, 2);
    let mut cuts = vec![lo];
    for &k in members {
        let mean = profile.stats[k].mean;
        if mean.is_zero() {
            continue;
        }
        let first = num::ceil(&(lo * mean + half));
        let last = (hi * mean + half).floor().to_integer();
        for j in first..=last {
            let b = (num::int(j) - half) / mean;
            if b > lo && b <= hi {
                cuts.push(b);
            }
        }
    }
    cuts.sort();
    cuts.dedup();
    let pattern = |a: &Rational| -> Vec<u64> {
        members
            .iter()
            .map(|&k| {
                let alpha = profile.bounds[k].clamp(*a);
                num::round_half_up(&(alpha * profile.stats[k].mean)).max(0) as u64
            })
            .collect()
    };
    let mut out: Vec<Rational> = Vec::new();
    let mut last: Option<Vec<u64>> = None;
    for c in cuts {
        let p = pattern(&c);
        if last.as_ref() != Some(&p) {
            out.push(c);
            last = Some(p);
        }
    }
    out
}

/// One point per reachable periodic demand, in odometer order (last
/// coordinate fastest). Fails if there are more than `limit`.
pub fn grid_points(space: &SearchSpace, limit: usize) -> Result<Vec<Vec<Rational>>> {
    let axes: Vec<Vec<Rational>> = (0..space.dimension()).map(|d| axis(space, d)).collect();
    let mut total: usize = 1;
    for a in &axes {
        total = total.saturating_mul(a.len());
    }
    if total > limit {
        return Err(Error::OracleCap(format!("{total} grid points exceed {limit}")));
    }
    let mut out = Vec::with_capacity(total);
    let mut idx = vec![0usize; axes.len()];
    loop {
        out.push(idx.iter().zip(&axes).map(|(&i, a)| a[i]).collect());
        let mut d = axes.len();
        loop {
            if d == 0 {
                return Ok(out);
            }
            d -= 1;
            idx[d] += 1;
            if idx[d] < axes[d].len() {
                break;
            }
            idx[d] = 0;
        }
    }
}

/// Cheapest reachable plan; the first in odometer order on ties.
pub fn grid_optimum(space: &SearchSpace, evaluator: &Evaluator, limit: usize) -> Result<(Vec<Rational>, CostBreakdown)> {
    let points = grid_points(space, limit)?;
    let costs = evaluator.evaluate_batch(space, &points)?;
    let best = argmin(&costs).expect("a grid has at least one point");
    let breakdown = evaluator.evaluate_point(space, &points[best])?;
    Ok((points[best].clone(), breakdown))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::{sharing, toy1};
    use crate::num::int;
    use std::collections::BTreeSet;

    #[test]
    fn illustration_has_five_demands() {
        let inst = toy1();
        let space = SearchSpace::scalar(&inst);
        let pts = grid_points(&space, GRID_LIMIT).unwrap();
        let ys: Vec<u64> = pts.iter().map(|p| space.to_demand(p)[0]).collect();
        assert_eq!(ys, vec![0, 1, 2, 3, 4]);
        let (_, best) = grid_optimum(&space, &Evaluator::new(&inst), GRID_LIMIT).unwrap();
        assert_eq!(best.c_pde, int(260));
        assert_eq!(best.periodic_demand, vec![4]);
    }

    #[test]
    fn full_grid_is_the_box_of_demands() {
        let inst = sharing();
        let space = SearchSpace::full(&inst);
        let pts = grid_points(&space, GRID_LIMIT).unwrap();
        let ys: BTreeSet<Vec<u64>> = pts.iter().map(|p| space.to_demand(p)).collect();
        // columns range over 2..=5, 1..=3, 0..=2, 4..=4
        assert_eq!(pts.len(), 4 * 3 * 3);
        assert_eq!(ys.len(), pts.len());
    }

    #[test]
    fn scalar_grid_distinct_and_complete() {
        let inst = sharing();
        let space = SearchSpace::scalar(&inst);
        let pts = grid_points(&space, GRID_LIMIT).unwrap();
        let ys: Vec<Vec<u64>> = pts.iter().map(|p| space.to_demand(p)).collect();
        let distinct: BTreeSet<_> = ys.iter().cloned().collect();
        assert_eq!(distinct.len(), ys.len());
        // a fine sweep of alpha finds nothing new
        let (lo, hi) = space.bounds()[0];
        let steps = 2000;
        for i in 0..=steps {
            let a = lo + (hi - lo) * num::ratio(i, steps);
            assert!(distinct.contains(&space.to_demand(&[a])), "{a}");
        }
    }

    #[test]
    fn cap_is_enforced() {
        let inst = sharing();
        let space = SearchSpace::full(&inst);
        assert!(matches!(grid_points(&space, 10), Err(Error::OracleCap(_))));
    }
}
