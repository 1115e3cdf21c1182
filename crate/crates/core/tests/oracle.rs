use pde_core::generate::random_small;
use pde_core::lowersolve::oracle::{oracle_flow, oracle_mcnd, ORACLE_FLOW_MAX_PATHS};
use pde_core::lowersolve::{solve_flow, solve_mcnd, Design};
use pde_core::{Instance, Rational};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn demand_for(inst: &Instance, seed: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9);
    (0..inst.num_commodities()).map(|_| rng.gen_range(0..=12)).collect()
}

/// Cheapest design cost plus flow, and among those the smallest sorted id
/// list. Paths that only serve commodities without demand stay closed.
fn brute_force_design(inst: &Instance, demand: &[u64]) -> (Rational, Vec<usize>) {
    let regular: Vec<usize> = (0..inst.paths.len())
        .filter(|&p| !inst.paths[p].outsourcing)
        .filter(|&p| inst.paths[p].served_commodities.iter().any(|&k| demand[k] > 0))
        .collect();
    let mut best: Option<(Rational, Vec<usize>)> = None;
    for mask in 0u32..(1 << regular.len()) {
        let ids: Vec<usize> = regular
            .iter()
            .enumerate()
            .filter(|(b, _)| mask & (1 << b) != 0)
            .map(|(_, &p)| inst.paths[p].id)
            .collect();
        let design = Design::with_paths(inst, &ids);
        let cost = design.design_cost(inst) + solve_flow(inst, &design, demand).unwrap().total_cost();
        let mut key = ids;
        key.sort_unstable();
        if best.as_ref().map_or(true, |(c, k)| cost < *c || (cost == *c && key < *k)) {
            best = Some((cost, key));
        }
    }
    best.unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn mcnd_matches_enumeration(seed in any::<u64>()) {
        let inst = random_small(seed);
        let demand = demand_for(&inst, seed);
        let sol = solve_mcnd(&inst, &demand).unwrap();
        prop_assert_eq!(sol.objective, oracle_mcnd(&inst, &demand).unwrap());
        let (cost, key) = brute_force_design(&inst, &demand);
        prop_assert_eq!(sol.objective, cost);
        prop_assert_eq!(sol.design.open_ids(&inst), key);
    }

    #[test]
    fn flow_matches_split_enumeration(seed in any::<u64>(), mask in any::<u32>()) {
        let inst = random_small(seed);
        let demand = demand_for(&inst, seed);
        let regular: Vec<usize> = inst.paths.iter().filter(|p| !p.outsourcing).map(|p| p.id).collect();
        let outsourcing = inst.paths.len() - regular.len();
        let room = ORACLE_FLOW_MAX_PATHS.saturating_sub(outsourcing);
        let ids: Vec<usize> = regular
            .iter()
            .enumerate()
            .filter(|(b, _)| mask & (1 << b) != 0)
            .map(|(_, &id)| id)
            .take(room)
            .collect();
        let design = Design::with_paths(&inst, &ids);
        let fast = solve_flow(&inst, &design, &demand).unwrap();
        prop_assert_eq!(fast.total_cost(), oracle_flow(&inst, &design, &demand).unwrap());
        prop_assert_eq!(fast.delivered(&inst), demand);
    }

    #[test]
    fn more_paths_never_cost_more_flow(seed in any::<u64>(), mask in any::<u32>()) {
        let inst = random_small(seed);
        let demand = demand_for(&inst, seed);
        let regular: Vec<usize> = inst.paths.iter().filter(|p| !p.outsourcing).map(|p| p.id).collect();
        let some: Vec<usize> = regular.iter().copied().filter(|id| mask & (1 << id) != 0).collect();
        let small = solve_flow(&inst, &Design::with_paths(&inst, &some), &demand).unwrap();
        let large = solve_flow(&inst, &Design::all_open(&inst), &demand).unwrap();
        prop_assert!(large.total_cost() <= small.total_cost());
    }

    #[test]
    fn relaxing_capacity_never_costs_more(seed in any::<u64>()) {
        let inst = random_small(seed);
        let demand = demand_for(&inst, seed);
        let tight = solve_mcnd(&inst, &demand).unwrap().objective;
        let loose = solve_mcnd(&inst.capacity_relaxed(), &demand).unwrap().objective;
        prop_assert!(loose <= tight);
    }
}
