use serde::{Deserialize, Serialize};

use crate::linear::LinearRegime;

use super::DesignKind;

/// `report.json` written by `design`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignSummary {
    pub design: DesignKind,
    /// `null` when a linear mechanism induces unbounded improvement.
    pub gain: Option<f64>,
    pub m: usize,
    pub oracle_calls: u64,
    pub epsilon_prime: Option<f64>,
    pub candidate_count: usize,
    pub candidates_file: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linear_regime: Option<LinearRegime>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

/// `eval.json` written by `eval`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub val: Option<f64>,
    pub baseline: f64,
    pub gain: Option<f64>,
    pub se: Option<f64>,
    pub unbounded: bool,
    pub m: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckGroup {
    /// `pass`, `fail`, or `skipped: <reason>`.
    pub status: String,
    pub checks: usize,
    pub failures: usize,
    /// Largest violation margin seen (`empirical - allowed`); negative when all pass.
    pub worst_margin: Option<f64>,
}

impl CheckGroup {
    pub fn skipped(reason: &str) -> Self {
        Self {
            status: format!("skipped: {reason}"),
            checks: 0,
            failures: 0,
            worst_margin: None,
        }
    }

    pub fn from_margins(margins: &[f64]) -> Self {
        let failures = margins.iter().filter(|&&d| d > 0.0).count();
        Self {
            status: if failures == 0 { "pass" } else { "fail" }.into(),
            checks: margins.len(),
            failures,
            worst_margin: margins.iter().copied().reduce(f64::max),
        }
    }

    pub fn failed(&self) -> bool {
        self.status == "fail"
    }
}

/// `verify.json` written by `verify`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub sigma: f64,
    pub m: usize,
    pub band: CheckGroup,
    pub tail: CheckGroup,
    pub gain_identity: CheckGroup,
    pub pass: bool,
}
