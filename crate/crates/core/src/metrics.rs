//! Resource-sharing and tightness metrics, and gap-to-best tables.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use serde::Serialize;

use crate::error::Result;
use crate::lowersolve::solve_mcnd;
use crate::model::Instance;
use crate::num::{self, Rational};
use crate::periodic::DemandProfile;

/// Commodities reachable through each service label.
fn service_members(inst: &Instance) -> BTreeMap<&str, BTreeSet<usize>> {
    let mut out: BTreeMap<&str, BTreeSet<usize>> = BTreeMap::new();
    for path in &inst.paths {
        for s in &path.services {
            out.entry(s.as_str())
                .or_default()
                .extend(path.served_commodities.iter().copied());
        }
    }
    out
}

/// Average number of commodities per service label. `None` without services.
pub fn tau(inst: &Instance) -> Option<Rational> {
    let services = service_members(inst);
    if services.is_empty() {
        return None;
    }
    let total: usize = services.values().map(BTreeSet::len).sum();
    Some(num::ratio(total as i128, services.len() as i128))
}

/// Average number of other commodities sharing at least one service with a
/// commodity. `None` without services.
pub fn kappa(inst: &Instance) -> Option<Rational> {
    let services = service_members(inst);
    let k = inst.num_commodities();
    if services.is_empty() || k == 0 {
        return None;
    }
    let mut partners = vec![BTreeSet::new(); k];
    for members in services.values() {
        for &a in members {
            partners[a].extend(members.iter().copied().filter(|&b| b != a));
        }
    }
    let total: usize = partners.iter().map(BTreeSet::len).sum();
    Some(num::ratio(total as i128, k as i128))
}

/// Commodities with some outsourced flow in the design problem at alpha = 1.
pub fn outsourced_set(inst: &Instance) -> Result<BTreeSet<usize>> {
    let profile = DemandProfile::new(inst);
    let demand = profile.to_demand(&vec![num::one(); inst.num_commodities()]);
    let mcnd = solve_mcnd(inst, &demand)?;
    Ok((0..inst.num_commodities())
        .filter(|&k| mcnd.outsources(inst, k))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GapRow {
    pub label: String,
    #[serde(with = "crate::num::serde_rational")]
    pub cost: Rational,
    /// Whole percent above the best cost, halves rounded up.
    pub gap_pct: Option<i128>,
}

/// Gap of each cost to the smallest one, as integer percent.
///
/// Every gap is `None` if the best cost is zero.
pub fn gap_table<S: AsRef<str>>(results: &[(S, Rational)]) -> Vec<GapRow> {
    let best = results.iter().map(|(_, c)| *c).min();
    results
        .iter()
        .map(|(label, cost)| GapRow {
            label: label.as_ref().to_string(),
            cost: *cost,
            gap_pct: best.filter(|b| !b.is_zero()).map(|b| {
                let pct = (cost - b) / b * Rational::from_integer(100);
                num::round_half_up(&pct)
            }),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InstanceProfile {
    #[serde(with = "crate::num::serde_rational_opt")]
    pub tau: Option<Rational>,
    #[serde(with = "crate::num::serde_rational_opt")]
    pub kappa: Option<Rational>,
    pub k_l: BTreeSet<usize>,
    pub commodities: usize,
    pub outsourced: usize,
    /// Number of regular paths.
    pub paths: usize,
    pub periods: usize,
}

pub fn profile(inst: &Instance) -> Result<InstanceProfile> {
    let k_l = outsourced_set(inst)?;
    Ok(InstanceProfile {
        tau: tau(inst),
        kappa: kappa(inst),
        commodities: inst.num_commodities(),
        outsourced: k_l.len(),
        k_l,
        paths: inst.paths.iter().filter(|p| !p.outsourcing).count(),
        periods: inst.periods(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::{sharing, toy1};
    use crate::model::DemandMatrix;
    use crate::num::{int, ratio};

    #[test]
    fn sharing_illustration() {
        let inst = sharing();
        assert_eq!(tau(&inst), Some(int(3)));
        assert_eq!(kappa(&inst), Some(ratio(5, 2)));
    }

    #[test]
    fn single_service_single_commodity() {
        let inst = toy1();
        // three labels, one commodity each
        assert_eq!(tau(&inst), Some(int(1)));
        assert_eq!(kappa(&inst), Some(int(0)));
    }

    #[test]
    fn no_services_is_absent() {
        let mut inst = toy1();
        for p in &mut inst.paths {
            p.services.clear();
        }
        assert_eq!(tau(&inst), None);
        assert_eq!(kappa(&inst), None);
    }

    #[test]
    fn outsourcing_on_illustration() {
        assert!(outsourced_set(&toy1()).unwrap().is_empty());
        // with path 1 limited to 1 unit, opening paths 1 and 2 is still
        // cheaper than outsourcing the second unit
        let mut inst = toy1();
        inst.paths[0].capacity = Some(1);
        assert!(outsourced_set(&inst).unwrap().is_empty());
        let mut inst = toy1();
        inst.forecasts = DemandMatrix::from_series(&[0, 0]);
        assert!(outsourced_set(&inst).unwrap().is_empty());
    }

    #[test]
    fn gaps() {
        let rows = gap_table(&[("a", int(280)), ("b", int(300)), ("c", int(320))]);
        let g: Vec<_> = rows.iter().map(|r| r.gap_pct).collect();
        assert_eq!(g, vec![Some(0), Some(7), Some(14)]);
        assert_eq!(gap_table(&[("x", int(5))])[0].gap_pct, Some(0));
        assert!(gap_table(&[("x", int(0)), ("y", int(3))]).iter().all(|r| r.gap_pct.is_none()));
        // 1/200 above best rounds up to 1%
        assert_eq!(gap_table(&[("a", int(200)), ("b", int(201))])[1].gap_pct, Some(1));
    }
}
