use std::fmt;
use std::time::Duration;

use serde::{Deserialize, Serialize};

/// Outcome of one check. Runtime is kept out of the serialized form so that
/// reports from identical inputs are byte-identical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub pass: bool,
    pub worst_residual: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
    #[serde(skip)]
    pub runtime: Duration,
}

impl VerificationReport {
    pub fn new(check: &str, pass: bool, worst_residual: f64, witness: Option<Vec<f64>>) -> Self {
        VerificationReport {
            check: check.to_string(),
            pass,
            worst_residual,
            witness,
            detail: String::new(),
            runtime: Duration::ZERO,
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }

    pub fn timed(mut self, runtime: Duration) -> Self {
        self.runtime = runtime;
        self
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<28} {:<4} {:>12.3e}",
            self.check,
            if self.pass { "PASS" } else { "FAIL" },
            self.worst_residual
        )?;
        if let Some(w) = &self.witness {
            write!(f, "  at {:?}", w)?;
        }
        if !self.detail.is_empty() {
            write!(f, "  {}", self.detail)?;
        }
        Ok(())
    }
}

/// Human-readable table of several reports.
pub fn table(reports: &[VerificationReport]) -> String {
    let mut s = format!("{:<28} {:<4} {:>12}\n", "check", "res", "worst");
    for r in reports {
        s.push_str(&r.to_string());
        s.push('\n');
    }
    s
}
