use thiserror::Error;

use crate::model::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at `{path}` (line {line}, column {column}): {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid instance: {}", format_violations(.0))]
    Invalid(Vec<Violation>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("no open path serves commodity {commodity}")]
    Infeasible { commodity: usize },

    #[error("instance exceeds the oracle size cap: {0}")]
    OracleCap(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),
}

fn format_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
