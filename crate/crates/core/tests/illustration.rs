use pde_core::lowersolve::evaluate_cpde;
use pde_core::model::fixtures::{toy1, toy1_u3};
use pde_core::num::{format_rational, ratio};
use pde_core::periodic::{mapping, Mapping};
use pde_core::search::SearchSpace;
use pde_core::Instance;

/// (open path ids, design, MCND flow, wMCND, plan cost, plan cost on observed)
fn row(inst: &Instance, y: &[u64]) -> (Vec<usize>, String, String, String, String, String) {
    let plan = evaluate_cpde(inst, y, &inst.forecasts).unwrap();
    let act = evaluate_cpde(inst, y, inst.observed.as_ref().unwrap()).unwrap();
    (
        plan.open_paths,
        format_rational(&plan.design_cost),
        format_rational(&plan.mcnd_flow_cost),
        format_rational(&plan.wmcnd_cost),
        format_rational(&plan.c_pde),
        format_rational(&act.c_pde),
    )
}

fn expect(ids: &[usize], cells: [&str; 5]) -> (Vec<usize>, String, String, String, String, String) {
    let [a, b, c, d, e] = cells.map(String::from);
    (ids.to_vec(), a, b, c, d, e)
}

#[test]
fn low_demand_rows() {
    let inst = toy1();
    let mean = expect(&[1], ["10", "10", "240", "300", "205"]);
    assert_eq!(row(&inst, &mapping(&inst, Mapping::Mean)), mean);
    assert_eq!(row(&inst, &mapping(&inst, Mapping::Q2)), mean);
    let space = SearchSpace::scalar(&inst);
    let y = space.to_demand(&[ratio(3, 2)]);
    assert_eq!(row(&inst, &y), expect(&[1, 2], ["20", "20", "160", "280", "185"]));
}

#[test]
fn high_demand_rows_as_drawn() {
    // with path 3 at capacity 2, y = 4 fits on paths 1 and 3
    let inst = toy1();
    let high = expect(&[1, 3], ["30", "30", "80", "260", "245"]);
    assert_eq!(row(&inst, &mapping(&inst, Mapping::Q3)), high);
    assert_eq!(row(&inst, &mapping(&inst, Mapping::Max)), high);
}

#[test]
fn every_row_with_unit_path_3() {
    let inst = toy1_u3();
    let mean = expect(&[1], ["10", "10", "240", "300", "205"]);
    let high = expect(&[1, 2, 3], ["40", "30", "80", "320", "305"]);
    assert_eq!(row(&inst, &mapping(&inst, Mapping::Mean)), mean);
    assert_eq!(row(&inst, &mapping(&inst, Mapping::Q2)), mean);
    assert_eq!(row(&inst, &mapping(&inst, Mapping::Q3)), high);
    assert_eq!(row(&inst, &mapping(&inst, Mapping::Max)), high);
    let y = SearchSpace::scalar(&inst).to_demand(&[ratio(3, 2)]);
    assert_eq!(row(&inst, &y), expect(&[1, 2], ["20", "20", "160", "280", "185"]));
}

#[test]
fn zero_alpha_builds_nothing() {
    let inst = toy1();
    let plan = evaluate_cpde(&inst, &[0], &inst.forecasts).unwrap();
    assert!(plan.open_paths.is_empty());
    assert_eq!(format_rational(&plan.design_cost), "0");
    // all 12 units outsourced at 50
    assert_eq!(format_rational(&plan.c_pde), "600");
}
