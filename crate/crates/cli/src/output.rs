use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

use pde_core::metrics::InstanceProfile;
use pde_core::num::format_rational;

use crate::{MappingRow, SolveReport};

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

pub fn write_text(dir: &Path, name: &str, text: &str) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<()> {
    write_text(dir, name, &to_json(value)?)
}

/// One CSV row per item, header from the field names. Nested fields are not
/// supported by the csv crate, so rows must be flat.
pub fn write_csv<T: Serialize>(dir: &Path, name: &str, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?;
    write_text(dir, name, &String::from_utf8(bytes)?)
}

#[derive(Serialize)]
struct SolveCsvRow<'a> {
    label: &'a str,
    paths: String,
    design_cost: String,
    mcnd_flow_cost: String,
    wmcnd_cost: String,
    c_pde: String,
    c_pde_act: String,
}

pub fn write_solve_csv(dir: &Path, report: &SolveReport) -> Result<()> {
    let c = report.cells();
    let row = SolveCsvRow {
        label: &report.label,
        paths: c[0].clone(),
        design_cost: c[1].clone(),
        mcnd_flow_cost: c[2].clone(),
        wmcnd_cost: c[3].clone(),
        c_pde: c[4].clone(),
        c_pde_act: c[5].clone(),
    };
    write_csv(dir, "solve.csv", &[row])
}

#[derive(Serialize)]
struct ProfileCsvRow {
    tau: String,
    kappa: String,
    commodities: usize,
    outsourced: usize,
    paths: usize,
    periods: usize,
    k_l: String,
}

pub fn write_profile_csv(dir: &Path, p: &InstanceProfile) -> Result<()> {
    let opt = |v: &Option<pde_core::Rational>| v.as_ref().map(format_rational).unwrap_or_default();
    let row = ProfileCsvRow {
        tau: opt(&p.tau),
        kappa: opt(&p.kappa),
        commodities: p.commodities,
        outsourced: p.outsourced,
        paths: p.paths,
        periods: p.periods,
        k_l: p.k_l.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(" "),
    };
    write_csv(dir, "profile.csv", &[row])
}

#[derive(Serialize)]
struct MappingCsvRow {
    mapping: String,
    periodic_demand: String,
    cost: String,
    actual_cost: String,
}

pub fn write_mappings_csv(dir: &Path, rows: &[MappingRow]) -> Result<()> {
    let flat: Vec<MappingCsvRow> = rows
        .iter()
        .map(|r| MappingCsvRow {
            mapping: r.mapping.to_string(),
            periodic_demand: r.periodic_demand.iter().map(|y| y.to_string()).collect::<Vec<_>>().join(" "),
            cost: format_rational(&r.cost),
            actual_cost: r.actual_cost.as_ref().map(format_rational).unwrap_or_default(),
        })
        .collect();
    write_csv(dir, "mappings.csv", &flat)
}
