//! Periodic demand mappings and the deviation-coefficient parameterization.
//!
//! A periodic demand is `y_k = round_half_up(alpha_k * mean_k)`, with
//! `alpha_k` bounded so that `y_k` stays between the smallest and largest
//! forecast of commodity `k`. Commodities with zero mean forecast are frozen at
//! `alpha_k = 1` and always get zero periodic demand.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::model::{demand_stats, DemandStats, Instance};
use crate::num::{self, Rational};

/// Periodic demand per commodity.
pub type PeriodicDemand = Vec<u64>;

/// The four fixed mappings from a forecast series to a periodic demand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mapping {
    Mean,
    Q2,
    Q3,
    Max,
}

impl Mapping {
    pub const ALL: [Mapping; 4] = [Mapping::Mean, Mapping::Q2, Mapping::Q3, Mapping::Max];

    pub fn name(self) -> &'static str {
        match self {
            Mapping::Mean => "mean",
            Mapping::Q2 => "q2",
            Mapping::Q3 => "q3",
            Mapping::Max => "max",
        }
    }
}

impl fmt::Display for Mapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mapping {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Mapping::ALL
            .into_iter()
            .find(|m| m.name() == s.to_ascii_lowercase())
            .ok_or_else(|| format!("unknown mapping {s:?} (expected mean, q2, q3 or max)"))
    }
}

/// Order-statistic position `(n - 1) * q` split into its integer part and
/// fractional remainder.
pub fn quantile_position(n: usize, q: Rational) -> (usize, Rational) {
    let pos = Rational::from_integer(n.saturating_sub(1) as i128) * q;
    let whole = pos.floor();
    (whole.to_integer() as usize, pos - whole)
}

/// Linear-interpolation quantile of sorted values.
pub fn quantile(sorted: &[Rational], q: Rational) -> Rational {
    if sorted.is_empty() {
        return Rational::zero();
    }
    let (lo, frac) = quantile_position(sorted.len(), q);
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// Applies one of the fixed mappings to every commodity's forecasts. Means
/// and quantiles are rounded up to the next integer.
pub fn mapping(inst: &Instance, which: Mapping) -> PeriodicDemand {
    (0..inst.num_commodities())
        .map(|k| {
            let column = inst.forecasts.column(k);
            let value = match which {
                Mapping::Max => return column.iter().copied().max().unwrap_or(0),
                Mapping::Mean => {
                    let total: i128 = column.iter().map(|&v| v as i128).sum();
                    Rational::new(total, column.len().max(1) as i128)
                }
                Mapping::Q2 | Mapping::Q3 => {
                    let mut sorted: Vec<Rational> =
                        column.iter().map(|&v| num::int(v as i128)).collect();
                    sorted.sort();
                    let q = if which == Mapping::Q2 {
                        num::ratio(1, 2)
                    } else {
                        num::ratio(3, 4)
                    };
                    quantile(&sorted, q)
                }
            };
            num::ceil(&value).max(0) as u64
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlphaBounds {
    #[serde(with = "crate::num::serde_rational")]
    pub min: Rational,
    #[serde(with = "crate::num::serde_rational")]
    pub max: Rational,
    /// Zero mean forecast: alpha pinned to 1 and excluded from search.
    pub frozen: bool,
}

impl AlphaBounds {
    fn frozen() -> Self {
        Self {
            min: Rational::one(),
            max: Rational::one(),
            frozen: true,
        }
    }

    pub fn clamp(&self, alpha: Rational) -> Rational {
        if self.frozen {
            Rational::one()
        } else {
            num::clamp(alpha, &self.min, &self.max)
        }
    }
}

fn bounds_from_stats(stats: &[DemandStats]) -> Vec<AlphaBounds> {
    stats
        .iter()
        .map(|s| {
            if s.mean.is_zero() {
                AlphaBounds::frozen()
            } else {
                AlphaBounds {
                    min: num::int(s.min as i128) / s.mean,
                    max: num::int(s.max as i128) / s.mean,
                    frozen: false,
                }
            }
        })
        .collect()
}

/// `alpha_min = min / mean` and `alpha_max = max / mean` per commodity.
pub fn alpha_bounds(inst: &Instance) -> Vec<AlphaBounds> {
    bounds_from_stats(&demand_stats(inst))
}

/// Bounds of a single alpha shared by every commodity: the loosest over all
/// non-frozen commodities, or `(1, 1)` if all are frozen.
pub fn scalar_bounds(inst: &Instance) -> (Rational, Rational) {
    combine_bounds(&alpha_bounds(inst), 0..inst.num_commodities())
}

/// Loosest bounds over a set of commodities.
pub fn combine_bounds(
    bounds: &[AlphaBounds],
    members: impl IntoIterator<Item = usize>,
) -> (Rational, Rational) {
    let mut lo: Option<Rational> = None;
    let mut hi: Option<Rational> = None;
    for k in members {
        let b = &bounds[k];
        if b.frozen {
            continue;
        }
        lo = Some(lo.map_or(b.min, |v| v.min(b.min)));
        hi = Some(hi.map_or(b.max, |v| v.max(b.max)));
    }
    (lo.unwrap_or_else(Rational::one), hi.unwrap_or_else(Rational::one))
}

/// Per-commodity deviation coefficients with their bounds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeviationVector {
    #[serde(with = "crate::num::serde_rational_vec")]
    pub alpha: Vec<Rational>,
    pub bounds: Vec<AlphaBounds>,
}

impl DeviationVector {
    /// Clamps each coefficient into its bounds; frozen entries become 1.
    pub fn new(bounds: Vec<AlphaBounds>, alpha: Vec<Rational>) -> Self {
        let alpha = alpha
            .into_iter()
            .zip(&bounds)
            .map(|(a, b)| b.clamp(a))
            .collect();
        Self { alpha, bounds }
    }

    pub fn ones(inst: &Instance) -> Self {
        let bounds = alpha_bounds(inst);
        let alpha = vec![Rational::one(); bounds.len()];
        Self::new(bounds, alpha)
    }

    /// Same alpha for every commodity, clamped per commodity.
    pub fn uniform(inst: &Instance, alpha: Rational) -> Self {
        let bounds = alpha_bounds(inst);
        let alpha = vec![alpha; bounds.len()];
        Self::new(bounds, alpha)
    }

    pub fn is_frozen(&self, k: usize) -> bool {
        self.bounds[k].frozen
    }

    pub fn within_bounds(&self) -> bool {
        self.alpha
            .iter()
            .zip(&self.bounds)
            .all(|(a, b)| if b.frozen { a.is_one() } else { b.min <= *a && *a <= b.max })
    }
}

/// Precomputed forecast statistics for repeated alpha-to-demand conversions.
#[derive(Debug, Clone)]
pub struct DemandProfile {
    pub stats: Vec<DemandStats>,
    pub bounds: Vec<AlphaBounds>,
}

impl DemandProfile {
    pub fn new(inst: &Instance) -> Self {
        let stats = demand_stats(inst);
        let bounds = bounds_from_stats(&stats);
        Self { stats, bounds }
    }

    pub fn frozen(&self) -> Vec<bool> {
        self.bounds.iter().map(|b| b.frozen).collect()
    }

    /// `round_half_up(alpha_k * mean_k)`, zero for frozen commodities.
    pub fn to_demand(&self, alpha: &[Rational]) -> PeriodicDemand {
        alpha
            .iter()
            .zip(&self.stats)
            .zip(&self.bounds)
            .map(|((a, s), b)| {
                if b.frozen {
                    0
                } else {
                    num::round_half_up(&(a * s.mean)).max(0) as u64
                }
            })
            .collect()
    }

    /// Alpha that reproduces `demand` exactly: `demand_k / mean_k`.
    pub fn alpha_of(&self, demand: &[u64]) -> Vec<Rational> {
        demand
            .iter()
            .zip(&self.stats)
            .map(|(&y, s)| {
                if s.mean.is_zero() {
                    Rational::one()
                } else {
                    num::int(y as i128) / s.mean
                }
            })
            .collect()
    }
}

pub fn alpha_to_demand(inst: &Instance, dv: &DeviationVector) -> PeriodicDemand {
    DemandProfile::new(inst).to_demand(&dv.alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::toy1;
    use crate::model::DemandMatrix;
    use crate::num::{int, ratio};
    use proptest::prelude::*;

    fn with_series(series: &[u64]) -> Instance {
        let mut inst = toy1();
        inst.forecasts = DemandMatrix::from_series(series);
        inst.observed = None;
        inst
    }

    #[test]
    fn illustration_mappings() {
        let inst = toy1();
        assert_eq!(mapping(&inst, Mapping::Mean), vec![2]);
        assert_eq!(mapping(&inst, Mapping::Q2), vec![2]);
        assert_eq!(mapping(&inst, Mapping::Q3), vec![4]);
        assert_eq!(mapping(&inst, Mapping::Max), vec![4]);
    }

    #[test]
    fn constant_series_maps_to_itself() {
        let inst = with_series(&[3, 3, 3, 3]);
        for m in Mapping::ALL {
            assert_eq!(mapping(&inst, m), vec![3], "{m}");
        }
    }

    #[test]
    fn quantile_interpolates() {
        let sorted: Vec<Rational> = [0, 1, 1, 2, 4, 4].iter().map(|&v| int(v)).collect();
        assert_eq!(quantile(&sorted, ratio(1, 2)), ratio(3, 2));
        assert_eq!(quantile(&sorted, ratio(3, 4)), ratio(7, 2));
        assert_eq!(quantile(&sorted, int(1)), int(4));
        assert_eq!(quantile(&sorted, int(0)), int(0));
    }

    #[test]
    fn bounds_of_illustration() {
        let b = alpha_bounds(&toy1());
        assert_eq!((b[0].min, b[0].max, b[0].frozen), (int(0), int(2), false));
        assert_eq!(scalar_bounds(&toy1()), (int(0), int(2)));
    }

    #[test]
    fn bounds_of_degenerate_series() {
        let b = alpha_bounds(&with_series(&[5, 5, 5]));
        assert_eq!((b[0].min, b[0].max), (int(1), int(1)));
        let b = alpha_bounds(&with_series(&[0, 0]));
        assert!(b[0].frozen);
        assert_eq!((b[0].min, b[0].max), (int(1), int(1)));
        assert_eq!(scalar_bounds(&with_series(&[0, 0])), (int(1), int(1)));
    }

    #[test]
    fn combined_bounds_take_the_loosest() {
        let bounds = vec![
            AlphaBounds { min: ratio(1, 2), max: ratio(6, 5), frozen: false },
            AlphaBounds { min: ratio(4, 5), max: int(3), frozen: false },
            AlphaBounds::frozen(),
        ];
        assert_eq!(combine_bounds(&bounds, 0..3), (ratio(1, 2), int(3)));
    }

    #[test]
    fn alpha_to_demand_examples() {
        let inst = toy1();
        let dv = |a| DeviationVector::uniform(&inst, a);
        assert_eq!(alpha_to_demand(&inst, &dv(ratio(3, 2))), vec![3]);
        assert_eq!(alpha_to_demand(&inst, &dv(int(1))), vec![2]);
        assert_eq!(alpha_to_demand(&inst, &dv(int(0))), vec![0]);
        // 1.25 * 2 = 2.5 rounds up
        assert_eq!(alpha_to_demand(&inst, &dv(ratio(5, 4))), vec![3]);
        let odd = with_series(&[1, 2]);
        assert_eq!(alpha_to_demand(&odd, &DeviationVector::ones(&odd)), vec![2]);
    }

    #[test]
    fn frozen_commodities_get_zero_demand() {
        let inst = with_series(&[0, 0, 0]);
        let dv = DeviationVector::uniform(&inst, int(2));
        assert_eq!(dv.alpha, vec![int(1)]);
        assert_eq!(alpha_to_demand(&inst, &dv), vec![0]);
    }

    fn series() -> impl Strategy<Value = Vec<u64>> {
        prop::collection::vec(0u64..40, 1..12)
    }

    proptest! {
        #[test]
        fn mean_before_rounding_matches_stats(s in series()) {
            let inst = with_series(&s);
            let mean = demand_stats(&inst)[0].mean;
            prop_assert_eq!(mapping(&inst, Mapping::Mean)[0] as i128, num::ceil(&mean));
        }

        #[test]
        fn order_statistic_mappings_are_monotone(s in series()) {
            let inst = with_series(&s);
            let q2 = mapping(&inst, Mapping::Q2)[0];
            let q3 = mapping(&inst, Mapping::Q3)[0];
            let max = mapping(&inst, Mapping::Max)[0];
            prop_assert!(q2 <= q3 && q3 <= max);
        }

        #[test]
        fn bound_endpoints_restore_extremes(s in series()) {
            let inst = with_series(&s);
            let b = &alpha_bounds(&inst)[0];
            prop_assume!(!b.frozen);
            let stats = &demand_stats(&inst)[0];
            let at = |a| alpha_to_demand(&inst, &DeviationVector::uniform(&inst, a))[0];
            prop_assert_eq!(at(b.max), stats.max);
            prop_assert_eq!(at(b.min), stats.min);
        }

        #[test]
        fn demand_is_monotone_in_alpha(s in series(), a in 0i128..400, d in 0i128..50) {
            let inst = with_series(&s);
            let profile = DemandProfile::new(&inst);
            let lo = ratio(a, 100);
            let hi = ratio(a + d, 100);
            prop_assert!(profile.to_demand(&[lo])[0] <= profile.to_demand(&[hi])[0]);
        }
    }
}
