//! Problem instances: commodities, candidate paths, and demand matrices.
//!
//! An instance is a path-based network design problem. Each path serves a
//! set of commodities, has a shared capacity, a fixed design cost paid every
//! period it is built, and a per-unit flow cost. Outsourcing paths are free to
//! build, uncapacitated, and strictly more expensive per unit than any regular
//! path of the commodities they serve; every commodity must have one, which
//! keeps every design feasible for every demand.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path as FsPath;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Commodity {
    pub id: usize,
    pub origin: String,
    pub destination: String,
    #[serde(default)]
    pub kind: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Path {
    pub id: usize,
    pub served_commodities: Vec<usize>,
    /// `None` is unbounded.
    pub capacity: Option<u64>,
    #[serde(with = "crate::num::serde_rational")]
    pub design_cost: Rational,
    /// Per-unit cost. For outsourcing paths this is the outsourcing cost.
    #[serde(with = "crate::num::serde_rational")]
    pub flow_cost: Rational,
    #[serde(default)]
    pub outsourcing: bool,
    #[serde(default)]
    pub services: Vec<String>,
}

impl Path {
    pub fn serves(&self, commodity: usize) -> bool {
        self.served_commodities.contains(&commodity)
    }
}

/// Row-major `T x K` matrix of nonnegative integer demands (rows are periods).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DemandMatrix {
    rows: Vec<Vec<u64>>,
}

impl DemandMatrix {
    pub fn new(rows: Vec<Vec<u64>>) -> Self {
        Self { rows }
    }

    /// Single-commodity matrix from a series of period demands.
    pub fn from_series(series: &[u64]) -> Self {
        Self::new(series.iter().map(|&v| vec![v]).collect())
    }

    pub fn periods(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    pub fn row(&self, period: usize) -> &[u64] {
        &self.rows[period]
    }

    pub fn get(&self, period: usize, commodity: usize) -> u64 {
        self.rows[period][commodity]
    }

    /// Demand of one commodity across all periods.
    pub fn column(&self, commodity: usize) -> Vec<u64> {
        self.rows.iter().map(|row| row[commodity]).collect()
    }

    fn shape_matches(&self, commodities: usize) -> bool {
        self.rows.iter().all(|row| row.len() == commodities)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub commodities: Vec<Commodity>,
    pub paths: Vec<Path>,
    pub forecasts: DemandMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observed: Option<DemandMatrix>,
}

impl Instance {
    pub fn num_commodities(&self) -> usize {
        self.commodities.len()
    }

    pub fn periods(&self) -> usize {
        self.forecasts.periods()
    }

    /// Position of the path with the given id.
    pub fn path_index(&self, id: usize) -> Option<usize> {
        self.paths.iter().position(|p| p.id == id)
    }

    /// Indices of paths serving `commodity`.
    pub fn paths_of(&self, commodity: usize) -> impl Iterator<Item = usize> + '_ {
        self.paths
            .iter()
            .enumerate()
            .filter(move |(_, p)| p.serves(commodity))
            .map(|(i, _)| i)
    }

    /// Copy of this instance with every regular path made uncapacitated.
    pub fn capacity_relaxed(&self) -> Instance {
        let mut relaxed = self.clone();
        for p in relaxed.paths.iter_mut().filter(|p| !p.outsourcing) {
            p.capacity = None;
        }
        relaxed
    }
}

/// What a violation is about.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subject {
    Commodity(usize),
    Path(usize),
    Forecasts,
    Observed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub subject: Subject,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.subject {
            Subject::Commodity(id) => write!(f, "commodity {id}: {}", self.message),
            Subject::Path(id) => write!(f, "path {id}: {}", self.message),
            Subject::Forecasts => write!(f, "forecasts: {}", self.message),
            Subject::Observed => write!(f, "observed: {}", self.message),
        }
    }
}

/// Every violated structural invariant. Empty iff the instance is well-formed.
pub fn validate_instance(inst: &Instance) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |subject, message: String| out.push(Violation { subject, message });
    let k = inst.num_commodities();

    for (pos, c) in inst.commodities.iter().enumerate() {
        if c.id != pos {
            push(
                Subject::Commodity(c.id),
                format!("commodity ids must be contiguous from 0 (found {} at position {pos})", c.id),
            );
        }
    }

    let mut seen_ids = BTreeSet::new();
    for p in &inst.paths {
        let subject = Subject::Path(p.id);
        if !seen_ids.insert(p.id) {
            push(subject, "duplicate path id".into());
        }
        for &c in &p.served_commodities {
            if c >= k {
                push(subject, format!("serves unknown commodity {c}"));
            }
        }
        if !num::is_nonnegative(&p.design_cost) {
            push(subject, "design cost must be nonnegative".into());
        }
        if !num::is_nonnegative(&p.flow_cost) {
            push(subject, "flow cost must be nonnegative".into());
        }
        if p.outsourcing {
            if !p.design_cost.is_zero() {
                push(subject, "outsourcing path must have zero design cost".into());
            }
            if p.capacity.is_some() {
                push(subject, "outsourcing path must have unbounded capacity".into());
            }
        } else if p.capacity.is_none() {
            push(subject, "non-outsourcing path must have finite capacity".into());
        }
    }

    for commodity in 0..k {
        let serving: Vec<&Path> = inst.paths.iter().filter(|p| p.serves(commodity)).collect();
        let outsourcing: Vec<&Path> = serving.iter().copied().filter(|p| p.outsourcing).collect();
        if outsourcing.is_empty() {
            push(
                Subject::Commodity(commodity),
                format!("commodity {commodity} has no outsourcing path"),
            );
            continue;
        }
        for out in &outsourcing {
            for regular in serving.iter().filter(|p| !p.outsourcing) {
                if out.flow_cost <= regular.flow_cost {
                    push(
                        Subject::Path(out.id),
                        format!(
                            "outsourcing cost must exceed flow cost of path {} for commodity {commodity}",
                            regular.id
                        ),
                    );
                }
            }
        }
    }

    let mut check_matrix = |m: &DemandMatrix, subject: Subject| {
        if m.periods() == 0 {
            push(subject, "at least one period is required".into());
        }
        if !m.shape_matches(k) {
            push(subject, format!("every row must have {k} entries"));
        }
    };
    check_matrix(&inst.forecasts, Subject::Forecasts);
    if let Some(obs) = &inst.observed {
        check_matrix(obs, Subject::Observed);
        if obs.periods() != inst.forecasts.periods() {
            push(Subject::Observed, "must have as many periods as the forecasts".into());
        }
    }
    out
}

/// Forecast summary of one commodity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DemandStats {
    pub mean: Rational,
    pub min: u64,
    pub max: u64,
}

pub fn demand_stats(inst: &Instance) -> Vec<DemandStats> {
    let periods = inst.periods().max(1) as i128;
    (0..inst.num_commodities())
        .map(|k| {
            let column = inst.forecasts.column(k);
            let total: i128 = column.iter().map(|&v| v as i128).sum();
            DemandStats {
                mean: Rational::new(total, periods),
                min: column.iter().copied().min().unwrap_or(0),
                max: column.iter().copied().max().unwrap_or(0),
            }
        })
        .collect()
}

/// Parses and validates an instance document.
pub fn load_instance(document: &str) -> Result<Instance> {
    let de = &mut serde_json::Deserializer::from_str(document);
    let inst: Instance = serde_path_to_error::deserialize(de).map_err(|err| {
        let path = err.path().to_string();
        let inner = err.into_inner();
        Error::Parse {
            path,
            line: inner.line(),
            column: inner.column(),
            message: inner.to_string(),
        }
    })?;
    let violations = validate_instance(&inst);
    if violations.is_empty() {
        Ok(inst)
    } else {
        Err(Error::Invalid(violations))
    }
}

/// Canonical pretty-printed JSON form.
pub fn save_instance(inst: &Instance) -> String {
    let mut text = serde_json::to_string_pretty(inst).expect("instance serialization is infallible");
    text.push('\n');
    text
}

pub fn read_instance(path: impl AsRef<FsPath>) -> Result<Instance> {
    load_instance(&std::fs::read_to_string(path)?)
}

pub fn write_instance(path: impl AsRef<FsPath>, inst: &Instance) -> Result<()> {
    std::fs::write(path, save_instance(inst))?;
    Ok(())
}

pub mod fixtures {
    //! Instances shipped with the crate.
    use super::*;

    pub const TOY1_JSON: &str = include_str!("../fixtures/toy1.json");
    pub const SHARING_JSON: &str = include_str!("../fixtures/sharing.json");
    pub const TOY1_U3_JSON: &str = include_str!("../fixtures/toy1_u3.json");

    /// One commodity, three regular paths plus outsourcing, six periods.
    pub fn toy1() -> Instance {
        load_instance(TOY1_JSON).expect("toy1 fixture is valid")
    }

    /// `toy1` with path 3 limited to one unit.
    pub fn toy1_u3() -> Instance {
        load_instance(TOY1_U3_JSON).expect("toy1_u3 fixture is valid")
    }

    /// Four commodities on two trains: k0 and k1 ride both, k2 rides A1, k3 rides A2.
    pub fn sharing() -> Instance {
        load_instance(SHARING_JSON).expect("sharing fixture is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::toy1;
    use super::*;
    use crate::num::int;

    #[test]
    fn toy1_is_valid() {
        let inst = toy1();
        assert_eq!(validate_instance(&inst), vec![]);
        assert_eq!(inst.paths.len(), 4);
        assert_eq!(inst.periods(), 6);
    }

    #[test]
    fn outsourcing_design_cost_is_flagged() {
        let mut inst = toy1();
        let p4 = inst.path_index(4).unwrap();
        inst.paths[p4].design_cost = int(10);
        let v = validate_instance(&inst);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].message, "outsourcing path must have zero design cost");
        assert_eq!(v[0].subject, Subject::Path(4));
    }

    #[test]
    fn unserved_commodity_is_flagged_once() {
        let mut inst = toy1();
        for p in &mut inst.paths {
            p.served_commodities.clear();
        }
        let v = validate_instance(&inst);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].message, "commodity 0 has no outsourcing path");
    }

    #[test]
    fn cheap_outsourcing_is_flagged() {
        let mut inst = toy1();
        let p4 = inst.path_index(4).unwrap();
        inst.paths[p4].flow_cost = int(10);
        let v = validate_instance(&inst);
        // paths 2 and 3 cost 10 per unit, so equality violates strictness
        assert_eq!(v.len(), 2);
    }

    #[test]
    fn shape_mismatch_is_flagged() {
        let mut inst = toy1();
        inst.observed = Some(DemandMatrix::from_series(&[1, 2, 3]));
        let v = validate_instance(&inst);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].subject, Subject::Observed);
    }

    #[test]
    fn stats_of_toy1() {
        let s = demand_stats(&toy1());
        assert_eq!(s, vec![DemandStats { mean: int(2), min: 0, max: 4 }]);
    }

    #[test]
    fn stats_of_constant_and_zero_series() {
        let mut inst = toy1();
        inst.forecasts = DemandMatrix::from_series(&[3, 3, 3]);
        inst.observed = None;
        assert_eq!(demand_stats(&inst)[0], DemandStats { mean: int(3), min: 3, max: 3 });
        inst.forecasts = DemandMatrix::from_series(&[0, 0, 0, 0]);
        assert_eq!(demand_stats(&inst)[0], DemandStats { mean: int(0), min: 0, max: 0 });
    }

    #[test]
    fn save_load_is_canonical() {
        let text = save_instance(&toy1());
        let again = load_instance(&text).unwrap();
        assert_eq!(again, toy1());
        assert_eq!(save_instance(&again), text);
    }

    #[test]
    fn negative_capacity_is_a_parse_error() {
        let doc = fixtures::TOY1_JSON.replacen("\"capacity\": 2", "\"capacity\": -2", 1);
        assert_ne!(doc, fixtures::TOY1_JSON);
        match load_instance(&doc) {
            Err(Error::Parse { path, line, .. }) => {
                assert!(path.contains("capacity"), "{path}");
                assert!(line > 1);
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn invalid_document_reports_violations() {
        let doc = fixtures::TOY1_JSON.replacen("\"design_cost\": \"0\"", "\"design_cost\": \"10\"", 1);
        assert!(matches!(load_instance(&doc), Err(Error::Invalid(v)) if v.len() == 1));
    }
}
