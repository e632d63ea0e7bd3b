//! Crate-wide error type.

use crate::scenario::Violation;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpillError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse {path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("cannot serialize: {0}")]
    Serialize(#[source] serde_json::Error),
    #[error("scenario invalid: {}", format_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("matrix dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("removal exceeds quantity in sector {sector}: {removal} > {quantity}")]
    RemovalExceedsQuantity {
        sector: usize,
        removal: f64,
        quantity: f64,
    },
    #[error("coverage {0} outside {{0,1,2,3}}")]
    CoverageOutOfRange(u32),
    #[error("unknown boom {0:?}")]
    UnknownBoom(String),
    #[error("unknown sector {0:?}")]
    UnknownSector(String),
    #[error("boom {boom:?} unable to reach sector {sector:?}")]
    Unreachable { boom: String, sector: String },
    #[error("boom {boom:?} assigned to more than one sector in period {period}")]
    BoomConflict { boom: String, period: usize },
    #[error("scenario structure unsupported: {0}")]
    UnsupportedStructure(String),
    #[error("degenerate scenario: no oil reaches a sensitive sector without intervention")]
    DegenerateScenario,
    #[error("policy {0:?} not in the backbone product space")]
    UnknownPolicy(String),
    #[error("invalid policy: {0}")]
    InvalidPolicy(String),
}

fn format_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
