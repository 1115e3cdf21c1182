//! Seeded synthetic instances.
//!
//! Each commodity gets a primary path that is cheapest to build and to use,
//! `paths_per_commodity - 2` dearer alternatives, and one outsourcing path.
//! Commodities are grouped `tau` at a time; all regular paths of a group
//! carry the group's service label, so the label-based sharing metrics track
//! `tau`. Capacities are `capacity_ratio` times the commodity's base demand.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{validate_instance, Commodity, DemandMatrix, Instance, Path};
use crate::num::{self, Rational};
use crate::search::gaussian;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub commodities: usize,
    pub periods: usize,
    /// Including the outsourcing path.
    pub paths_per_commodity: usize,
    /// Commodities per service label.
    pub tau: usize,
    /// Regular path capacity over base demand.
    pub capacity_ratio: f64,
    /// Design cost as a share of the outsourcing savings of a full path over
    /// one period.
    pub design_scale: f64,
    /// Relative standard deviation of per-period demand.
    pub volatility: f64,
    pub spike_prob: f64,
    /// A spike multiplies demand by `1 + spike_scale`.
    pub spike_scale: f64,
    /// Inclusive range of base demands.
    pub base_demand: (u64, u64),
    /// Add one extra path per group serving every member.
    pub shared_paths: bool,
    /// Also draw an observed demand matrix.
    pub observed: bool,
}

impl Default for GenSpec {
    fn default() -> Self {
        Self {
            commodities: 4,
            periods: 6,
            paths_per_commodity: 3,
            tau: 2,
            capacity_ratio: 1.0,
            design_scale: 0.3,
            volatility: 0.3,
            spike_prob: 0.0,
            spike_scale: 0.0,
            base_demand: (2, 8),
            shared_paths: false,
            observed: true,
        }
    }
}

impl GenSpec {
    /// Ample capacity and cheap paths: nothing is outsourced at the mean.
    pub fn unconstrained(commodities: usize) -> Self {
        Self {
            commodities,
            tau: 2.min(commodities.max(1)),
            capacity_ratio: 10.0,
            design_scale: 0.02,
            volatility: 0.3,
            ..Self::default()
        }
    }

    /// Short capacity, costly paths and rare demand spikes.
    pub fn tight(commodities: usize) -> Self {
        Self {
            commodities,
            tau: 2.min(commodities.max(1)),
            periods: 8,
            capacity_ratio: 0.8,
            design_scale: 0.8,
            volatility: 0.1,
            spike_prob: 0.1,
            spike_scale: 2.0,
            ..Self::default()
        }
    }

    fn check(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Parameter(m));
        if self.commodities == 0 || self.periods == 0 {
            return bad("need at least one commodity and one period".into());
        }
        if self.paths_per_commodity < 2 {
            return bad("paths_per_commodity counts the outsourcing path and must be at least 2".into());
        }
        if self.tau == 0 || self.tau > self.commodities {
            return bad(format!("tau must be in 1..={}", self.commodities));
        }
        if self.base_demand.0 > self.base_demand.1 {
            return bad("base_demand range is empty".into());
        }
        let finite_nonneg = [
            self.capacity_ratio,
            self.design_scale,
            self.volatility,
            self.spike_prob,
            self.spike_scale,
        ]
        .iter()
        .all(|v| v.is_finite() && *v >= 0.0);
        if !finite_nonneg || self.capacity_ratio == 0.0 || self.spike_prob > 1.0 {
            return bad("ratios must be finite, nonnegative, capacity_ratio > 0, spike_prob <= 1".into());
        }
        Ok(())
    }
}

fn draw_series<R: Rng>(spec: &GenSpec, base: u64, rng: &mut R) -> Vec<u64> {
    (0..spec.periods)
        .map(|_| {
            let mut d = base as f64 * (1.0 + spec.volatility * gaussian(rng));
            if rng.gen::<f64>() < spec.spike_prob {
                d *= 1.0 + spec.spike_scale;
            }
            d.round().max(0.0) as u64
        })
        .collect()
}

fn transpose(columns: &[Vec<u64>], periods: usize) -> DemandMatrix {
    DemandMatrix::new(
        (0..periods)
            .map(|t| columns.iter().map(|c| c[t]).collect())
            .collect(),
    )
}

/// Named instances: `toy1`, `default`, `unconstrained`, `tight`.
pub fn preset(name: &str, commodities: usize, seed: u64) -> Result<Instance> {
    let spec = match name {
        "toy1" => return Ok(crate::model::fixtures::toy1()),
        "default" => GenSpec {
            commodities,
            tau: GenSpec::default().tau.min(commodities.max(1)),
            ..GenSpec::default()
        },
        "unconstrained" => GenSpec::unconstrained(commodities),
        "tight" => GenSpec::tight(commodities),
        other => return Err(Error::Parameter(format!("unknown preset {other:?}"))),
    };
    generate(&spec, seed)
}

pub fn generate(spec: &GenSpec, seed: u64) -> Result<Instance> {
    spec.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = spec.commodities;
    let bases: Vec<u64> = (0..k)
        .map(|_| rng.gen_range(spec.base_demand.0..=spec.base_demand.1).max(1))
        .collect();

    let commodities = (0..k)
        .map(|c| Commodity {
            id: c,
            origin: format!("O{}", c / spec.tau),
            destination: format!("D{c}"),
            kind: String::new(),
        })
        .collect();

    // regular paths first, one block per commodity, then shared and outsourcing
    let mut paths = Vec::new();
    let mut max_flow = vec![0i128; k];
    let mut regular = Vec::new();
    for (c, &base) in bases.iter().enumerate() {
        let mut flow = rng.gen_range(1..=3i128);
        let mut design_factor = rng.gen_range(0.5..0.8);
        for j in 0..spec.paths_per_commodity - 1 {
            if j > 0 {
                flow += rng.gen_range(1..=3);
                design_factor += rng.gen_range(0.1..0.3);
            }
            let share = if j == 0 { 1.0 } else { rng.gen_range(0.5..1.0) };
            let capacity = (spec.capacity_ratio * base as f64 * share).round().max(1.0) as u64;
            regular.push((c, capacity, flow, design_factor));
            max_flow[c] = max_flow[c].max(flow);
        }
    }
    let outsourcing: Vec<i128> = max_flow
        .iter()
        .map(|&f| 10 * f + rng.gen_range(0..=5))
        .collect();
    let design_cost = |c: usize, capacity: u64, flow: i128, factor: f64| -> Rational {
        let savings = (outsourcing[c] - flow) as f64 * capacity as f64;
        num::int((spec.design_scale * factor * savings).round().max(1.0) as i128)
    };
    // alternatives never undercut the previous path's design cost
    let mut floor: Option<(usize, Rational)> = None;
    for (c, capacity, flow, factor) in regular {
        let mut cost = design_cost(c, capacity, flow, factor);
        if let Some((prev_c, prev)) = floor {
            if prev_c == c && cost <= prev {
                cost = prev + num::int(1);
            }
        }
        floor = Some((c, cost));
        paths.push(Path {
            id: paths.len(),
            served_commodities: vec![c],
            capacity: Some(capacity),
            design_cost: cost,
            flow_cost: num::int(flow),
            outsourcing: false,
            services: vec![format!("G{}", c / spec.tau)],
        });
    }
    if spec.shared_paths {
        for (g, members) in (0..k).collect::<Vec<_>>().chunks(spec.tau).enumerate() {
            if members.len() < 2 {
                continue;
            }
            let capacity: u64 = members.iter().map(|&c| bases[c]).sum::<u64>().max(1);
            let flow = members.iter().map(|&c| max_flow[c]).max().unwrap_or(1);
            let cheapest = members.iter().map(|&c| outsourcing[c]).min().unwrap_or(1);
            let savings = (cheapest - flow) as f64 * capacity as f64;
            paths.push(Path {
                id: paths.len(),
                served_commodities: members.to_vec(),
                capacity: Some((spec.capacity_ratio * capacity as f64).round().max(1.0) as u64),
                design_cost: num::int((spec.design_scale * 0.9 * savings).round().max(1.0) as i128),
                flow_cost: num::int(flow),
                outsourcing: false,
                services: vec![format!("G{g}")],
            });
        }
    }
    for (c, &o) in outsourcing.iter().enumerate() {
        paths.push(Path {
            id: paths.len(),
            served_commodities: vec![c],
            capacity: None,
            design_cost: num::int(0),
            flow_cost: num::int(o),
            outsourcing: true,
            services: Vec::new(),
        });
    }

    let forecasts: Vec<Vec<u64>> = bases.iter().map(|&b| draw_series(spec, b, &mut rng)).collect();
    let observed = spec.observed.then(|| {
        let cols: Vec<Vec<u64>> = bases.iter().map(|&b| draw_series(spec, b, &mut rng)).collect();
        transpose(&cols, spec.periods)
    });
    let inst = Instance {
        commodities,
        paths,
        forecasts: transpose(&forecasts, spec.periods),
        observed,
    };
    let violations = validate_instance(&inst);
    if violations.is_empty() {
        Ok(inst)
    } else {
        Err(Error::Invalid(violations))
    }
}

/// Small random instance for cross-checking solvers: at most 3 commodities,
/// 11 regular paths (some shared, some free to build, some of capacity 0),
/// half-integer costs and up to 4 periods of demand in `0..=8`.
pub fn random_small(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = rng.gen_range(1..=3usize);
    let half = |rng: &mut ChaCha8Rng, hi: i128| num::ratio(rng.gen_range(0..=hi), 2);
    let mut paths = Vec::new();
    for c in 0..k {
        for _ in 0..rng.gen_range(1..=3) {
            paths.push((vec![c], rng.gen_range(0..=6u64)));
        }
    }
    if k > 1 {
        for _ in 0..rng.gen_range(0..=2) {
            let mut members: Vec<usize> = (0..k).filter(|_| rng.gen_bool(0.7)).collect();
            if members.len() < 2 {
                members = vec![0, 1];
            }
            paths.push((members, rng.gen_range(0..=6u64)));
        }
    }
    let mut out: Vec<Path> = paths
        .into_iter()
        .enumerate()
        .map(|(id, (served, cap))| Path {
            id,
            served_commodities: served,
            capacity: Some(cap),
            design_cost: half(&mut rng, 40),
            flow_cost: half(&mut rng, 20),
            outsourcing: false,
            services: vec![format!("S{}", id % 4)],
        })
        .collect();
    for c in 0..k {
        let top = out
            .iter()
            .filter(|p| p.serves(c))
            .map(|p| p.flow_cost)
            .max()
            .unwrap_or_else(|| num::int(0));
        let extra = num::ratio(rng.gen_range(1..=20), 2);
        out.push(Path {
            id: out.len(),
            served_commodities: vec![c],
            capacity: None,
            design_cost: num::int(0),
            flow_cost: top + extra,
            outsourcing: true,
            services: Vec::new(),
        });
    }
    let periods = rng.gen_range(1..=4usize);
    let rows = (0..periods)
        .map(|_| (0..k).map(|_| rng.gen_range(0..=8u64)).collect())
        .collect();
    Instance {
        commodities: (0..k)
            .map(|c| Commodity {
                id: c,
                origin: "O".into(),
                destination: format!("D{c}"),
                kind: String::new(),
            })
            .collect(),
        paths: out,
        forecasts: DemandMatrix::new(rows),
        observed: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{outsourced_set, tau};
    use crate::model::save_instance;

    #[test]
    fn deterministic_per_seed() {
        let spec = GenSpec::default();
        let a = save_instance(&generate(&spec, 11).unwrap());
        let b = save_instance(&generate(&spec, 11).unwrap());
        assert_eq!(a, b);
        assert_ne!(a, save_instance(&generate(&spec, 12).unwrap()));
    }

    #[test]
    fn rejects_unsatisfiable() {
        let spec = GenSpec {
            tau: 5,
            ..GenSpec::default()
        };
        assert!(matches!(generate(&spec, 0), Err(Error::Parameter(_))));
        let spec = GenSpec {
            paths_per_commodity: 1,
            ..GenSpec::default()
        };
        assert!(generate(&spec, 0).is_err());
    }

    #[test]
    fn tau_follows_group_size() {
        for t in 1..=4 {
            let spec = GenSpec {
                commodities: 8,
                tau: t,
                ..GenSpec::default()
            };
            let inst = generate(&spec, 3).unwrap();
            let groups = 8usize.div_ceil(t);
            assert_eq!(tau(&inst), Some(num::ratio(8, groups as i128)));
        }
    }

    #[test]
    fn ample_capacity_outsources_nothing() {
        for seed in 0..10 {
            let inst = generate(&GenSpec::unconstrained(4), seed).unwrap();
            assert!(outsourced_set(&inst).unwrap().is_empty(), "seed {seed}");
        }
    }

    #[test]
    fn random_small_is_valid() {
        for seed in 0..200 {
            let inst = random_small(seed);
            assert!(validate_instance(&inst).is_empty(), "seed {seed}");
            assert!(inst.paths.iter().filter(|p| !p.outsourcing).count() <= 11);
        }
    }

    #[test]
    fn shared_paths_are_valid() {
        let spec = GenSpec {
            commodities: 5,
            tau: 2,
            shared_paths: true,
            ..GenSpec::default()
        };
        let inst = generate(&spec, 4).unwrap();
        assert_eq!(inst.paths.iter().filter(|p| p.served_commodities.len() > 1).count(), 2);
    }
}
