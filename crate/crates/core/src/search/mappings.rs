use serde::Serialize;

use super::Evaluator;
use crate::error::Result;
use crate::lowersolve::CostBreakdown;
use crate::periodic::{mapping, Mapping};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MappingCost {
    pub mapping: Mapping,
    pub breakdown: CostBreakdown,
}

/// Plan cost of each fixed mapping, in `Mapping::ALL` order.
pub fn enumerate_mappings(evaluator: &Evaluator) -> Result<Vec<MappingCost>> {
    let inst = evaluator.instance();
    Mapping::ALL
        .iter()
        .map(|&m| {
            Ok(MappingCost {
                mapping: m,
                breakdown: evaluator.evaluate_demand(&mapping(inst, m))?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::toy1;
    use crate::model::DemandMatrix;
    use crate::num::int;

    fn costs(rows: &[MappingCost]) -> Vec<i128> {
        rows.iter().map(|r| r.breakdown.c_pde.to_integer()).collect()
    }

    #[test]
    fn illustration_forecasts() {
        let inst = toy1();
        let rows = enumerate_mappings(&Evaluator::new(&inst)).unwrap();
        // q3 and max both give y = 4, which opens paths 1 and 3 here
        assert_eq!(costs(&rows), vec![300, 300, 260, 260]);
    }

    #[test]
    fn illustration_observed() {
        let inst = toy1();
        let observed = inst.observed.clone().unwrap();
        let rows = enumerate_mappings(&Evaluator::on(&inst, &observed)).unwrap();
        assert_eq!(costs(&rows), vec![205, 205, 245, 245]);
    }

    #[test]
    fn constant_demand_all_equal() {
        let mut inst = toy1();
        inst.forecasts = DemandMatrix::from_series(&[3, 3, 3]);
        let eval = Evaluator::new(&inst);
        let rows = enumerate_mappings(&eval).unwrap();
        assert!(rows.iter().all(|r| r.breakdown == rows[0].breakdown));
        assert_eq!(rows[0].breakdown.periodic_demand, vec![3]);
        assert_eq!(eval.solves(), 1);
        assert!(rows[0].breakdown.c_pde > int(0));
    }
}
