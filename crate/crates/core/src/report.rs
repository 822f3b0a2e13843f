//! Claim records shared by every report.

use serde::{Deserialize, Serialize};

/// Schema tag embedded in every emitted report.
pub const SCHEMA_VERSION: &str = "tlab-report/1";

pub fn report_schema_version() -> &'static str {
    SCHEMA_VERSION
}

/// How a reported number was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClaimKind {
    Exact,
    CertifiedBound,
    SampledEstimate,
}

/// One checked inequality `lhs ≤ rhs` (or a recorded measurement when
/// `rhs` is absent).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Claim {
    pub name: String,
    pub kind: ClaimKind,
    pub lhs: f64,
    pub rhs: Option<f64>,
    pub pass: bool,
}

impl Claim {
    /// `lhs ≤ rhs + slack`.
    pub fn le(name: impl Into<String>, kind: ClaimKind, lhs: f64, rhs: f64, slack: f64) -> Self {
        Self {
            name: name.into(),
            kind,
            lhs,
            rhs: Some(rhs),
            pass: lhs <= rhs + slack,
        }
    }

    /// A measured value with nothing to compare against.
    pub fn measured(name: impl Into<String>, kind: ClaimKind, value: f64) -> Self {
        Self {
            name: name.into(),
            kind,
            lhs: value,
            rhs: None,
            pass: true,
        }
    }
}

/// Names of the failed claims.
pub fn failures(claims: &[Claim]) -> Vec<String> {
    claims.iter().filter(|c| !c.pass).map(|c| c.name.clone()).collect()
}
