//! Commodity clusterings that tie deviation coefficients together.
//!
//! All commodities of a cluster share one alpha value, which shrinks the
//! search space from one variable per commodity to one per cluster. Three
//! data-driven heuristics are provided: by coefficient of variation of the
//! forecasts (CV), by services shared along the routes of the mean-demand
//! plan (CR), and the same with path capacities relaxed (CRU).

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::lowersolve::{solve_mcnd, McndSolution};
use crate::model::{demand_stats, Instance};
use crate::num::{self, Rational};
use crate::periodic::{quantile_position, DemandProfile, DeviationVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClusterMethod {
    Cv,
    Cr,
    Cru,
    Singleton,
    Global,
}

impl fmt::Display for ClusterMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClusterMethod::Cv => "cv",
            ClusterMethod::Cr => "cr",
            ClusterMethod::Cru => "cru",
            ClusterMethod::Singleton => "singleton",
            ClusterMethod::Global => "global",
        })
    }
}

impl FromStr for ClusterMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "cv" => Ok(ClusterMethod::Cv),
            "cr" => Ok(ClusterMethod::Cr),
            "cru" => Ok(ClusterMethod::Cru),
            "singleton" => Ok(ClusterMethod::Singleton),
            "global" => Ok(ClusterMethod::Global),
            _ => Err(format!("unknown clustering {s:?} (expected cv, cr or cru)")),
        }
    }
}

/// Ordered partition of the non-frozen commodities.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Clustering {
    pub method: ClusterMethod,
    pub clusters: Vec<Vec<usize>>,
}

impl Clustering {
    /// All non-frozen commodities in one cluster.
    pub fn global(inst: &Instance) -> Self {
        let members = active_commodities(inst);
        Self {
            method: ClusterMethod::Global,
            clusters: if members.is_empty() { vec![] } else { vec![members] },
        }
    }

    /// One cluster per non-frozen commodity.
    pub fn singleton(inst: &Instance) -> Self {
        Self {
            method: ClusterMethod::Singleton,
            clusters: active_commodities(inst).into_iter().map(|k| vec![k]).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    /// Whether the clusters are nonempty, pairwise disjoint, and cover exactly `members`.
    pub fn is_partition_of(&self, members: &[usize]) -> bool {
        let mut seen = BTreeSet::new();
        for cluster in &self.clusters {
            if cluster.is_empty() {
                return false;
            }
            for &k in cluster {
                if !seen.insert(k) {
                    return false;
                }
            }
        }
        seen.into_iter().eq(members.iter().copied().collect::<BTreeSet<_>>())
    }
}

/// Commodities with a positive mean forecast, ascending.
pub fn active_commodities(inst: &Instance) -> Vec<usize> {
    demand_stats(inst)
        .iter()
        .enumerate()
        .filter(|(_, s)| !s.mean.is_zero())
        .map(|(k, _)| k)
        .collect()
}

/// Population coefficient of variation of each non-frozen commodity's forecasts.
pub fn coeff_variation(inst: &Instance) -> Vec<(usize, f64)> {
    let periods = inst.periods().max(1) as i128;
    demand_stats(inst)
        .iter()
        .enumerate()
        .filter(|(_, s)| !s.mean.is_zero())
        .map(|(k, s)| {
            let squares = inst
                .forecasts
                .column(k)
                .iter()
                .map(|&y| {
                    let d = num::int(y as i128) - s.mean;
                    d * d
                })
                .fold(Rational::zero(), |acc, v| acc + v);
            let variance = squares / num::int(periods);
            (k, num::to_f64(&variance).sqrt() / num::to_f64(&s.mean))
        })
        .collect()
}

/// Percentile levels separating CV buckets.
pub fn cv_breakpoints(n_clusters: usize) -> Vec<Rational> {
    if n_clusters == 5 {
        vec![num::ratio(1, 4), num::ratio(1, 2), num::ratio(3, 4), num::ratio(9, 10)]
    } else {
        (1..n_clusters.max(1))
            .map(|i| num::ratio(i as i128, n_clusters as i128))
            .collect()
    }
}

/// Linear-interpolation percentile of unsorted values.
pub fn percentile(values: &[f64], level: Rational) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted.is_empty() {
        return 0.0;
    }
    let (lo, frac) = quantile_position(sorted.len(), level);
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + num::to_f64(&frac) * (sorted[hi] - sorted[lo])
}

/// Buckets `(commodity, value)` pairs by percentile thresholds: the first
/// bucket holds values `<= Q_1`, bucket `i` holds `Q_{i-1} < v <= Q_i`, the
/// last holds values above the top threshold. Empty buckets are dropped.
pub fn bucket_by_percentiles(values: &[(usize, f64)], levels: &[Rational]) -> Vec<Vec<usize>> {
    let raw: Vec<f64> = values.iter().map(|&(_, v)| v).collect();
    let thresholds: Vec<f64> = levels.iter().map(|&l| percentile(&raw, l)).collect();
    let mut buckets = vec![Vec::new(); thresholds.len() + 1];
    for &(k, v) in values {
        let slot = thresholds.iter().position(|&t| v <= t).unwrap_or(thresholds.len());
        buckets[slot].push(k);
    }
    buckets.retain(|b| !b.is_empty());
    buckets
}

/// Variance-based clustering into at most `n_clusters` percentile buckets.
pub fn cluster_cv(inst: &Instance, n_clusters: usize) -> Clustering {
    let values = coeff_variation(inst);
    Clustering {
        method: ClusterMethod::Cv,
        clusters: bucket_by_percentiles(&values, &cv_breakpoints(n_clusters)),
    }
}

/// Service labels on the regular paths carrying flow of each commodity.
pub fn route_services(inst: &Instance, mcnd: &McndSolution) -> Vec<BTreeSet<String>> {
    (0..inst.num_commodities())
        .map(|k| {
            inst.paths
                .iter()
                .enumerate()
                .filter(|(p, path)| !path.outsourcing && mcnd.flow.amount(inst, *p, k) > 0)
                .flat_map(|(_, path)| path.services.iter().cloned())
                .collect()
        })
        .collect()
}

/// For each member commodity, itself plus every member sharing a route service with it.
pub fn service_groups(routes: &[BTreeSet<String>], members: &[usize]) -> Vec<BTreeSet<usize>> {
    members
        .iter()
        .map(|&k| {
            let mut group: BTreeSet<usize> = members
                .iter()
                .copied()
                .filter(|&other| !routes[k].is_disjoint(&routes[other]))
                .collect();
            group.insert(k);
            group
        })
        .collect()
}

/// Greedy selection: repeatedly take the largest group of size > 1 disjoint
/// from those already chosen (ties to the smallest member id); leftovers form
/// one final cluster.
pub fn select_groups(groups: &[BTreeSet<usize>], members: &[usize]) -> Vec<Vec<usize>> {
    let mut taken: BTreeSet<usize> = BTreeSet::new();
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    loop {
        let best = groups
            .iter()
            .filter(|g| g.len() > 1 && g.is_disjoint(&taken))
            .min_by(|a, b| b.len().cmp(&a.len()).then(a.first().cmp(&b.first())));
        let Some(group) = best else { break };
        taken.extend(group.iter().copied());
        clusters.push(group.iter().copied().collect());
    }
    let rest: Vec<usize> = members.iter().copied().filter(|k| !taken.contains(k)).collect();
    if !rest.is_empty() {
        clusters.push(rest);
    }
    clusters
}

fn service_clustering(inst: &Instance, planning: &Instance, method: ClusterMethod) -> Result<Clustering> {
    let members = active_commodities(inst);
    let profile = DemandProfile::new(inst);
    let demand = profile.to_demand(&vec![num::one(); inst.num_commodities()]);
    let mcnd = solve_mcnd(planning, &demand)?;
    let routes = route_services(planning, &mcnd);
    let groups = service_groups(&routes, &members);
    Ok(Clustering {
        method,
        clusters: select_groups(&groups, &members),
    })
}

/// Service-based clustering from the mean-demand design.
pub fn cluster_cr(inst: &Instance) -> Result<Clustering> {
    service_clustering(inst, inst, ClusterMethod::Cr)
}

/// Service-based clustering from the mean-demand design with regular path
/// capacities removed.
pub fn cluster_cru(inst: &Instance) -> Result<Clustering> {
    service_clustering(inst, &inst.capacity_relaxed(), ClusterMethod::Cru)
}

/// One alpha per cluster, broadcast to the members and clamped into each
/// member's own bounds. Commodities outside every cluster get 1.
pub fn expand(clustering: &Clustering, cluster_alphas: &[Rational], inst: &Instance) -> DeviationVector {
    let profile = DemandProfile::new(inst);
    expand_with(clustering, cluster_alphas, &profile)
}

pub fn expand_with(
    clustering: &Clustering,
    cluster_alphas: &[Rational],
    profile: &DemandProfile,
) -> DeviationVector {
    let mut alpha = vec![num::one(); profile.bounds.len()];
    for (cluster, &value) in clustering.clusters.iter().zip(cluster_alphas) {
        for &k in cluster {
            alpha[k] = value;
        }
    }
    DeviationVector::new(profile.bounds.clone(), alpha)
}
