//! Check reports in text and JSON form. Both forms carry the same fields.

use std::fmt::Write as _;

use serde::Serialize;

use super::checks::{Outcome, Verdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

impl Status {
    fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Error => "ERROR",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub check: String,
    pub status: Status,
    /// Exact residual in canonical form; present for failures.
    pub residual: Option<String>,
    /// Error message; present when the check could not be evaluated.
    pub error: Option<String>,
    pub value: Option<String>,
    /// Wall time in milliseconds, only with `--timing`.
    pub timing_ms: Option<u64>,
}

impl CheckReport {
    pub fn new(name: String, check: &str, outcome: Outcome, timing_ms: Option<u64>) -> Self {
        let (status, residual, error) = match outcome.verdict {
            Verdict::Pass => (Status::Pass, None, None),
            Verdict::Fail(r) => (Status::Fail, Some(r), None),
            Verdict::Error(e) => (Status::Error, None, Some(e)),
        };
        CheckReport { name, check: check.to_string(), status, residual, error, value: outcome.value, timing_ms }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub scenario: String,
    pub seed: u64,
    pub hbar_order: usize,
    pub grid: usize,
    pub passed: bool,
    pub checks: Vec<CheckReport>,
}

impl Report {
    /// Sorts checks by name so output does not depend on scheduling.
    pub fn new(scenario: String, seed: u64, hbar_order: usize, grid: usize, mut checks: Vec<CheckReport>) -> Self {
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        let passed = checks.iter().all(|c| c.status == Status::Pass);
        Report { scenario, seed, hbar_order, grid, passed, checks }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "scenario {} (seed {}, H = {}, grid {})", self.scenario, self.seed, self.hbar_order, self.grid);
        for c in &self.checks {
            let _ = write!(out, "{:<5} {}", c.status.label(), c.name);
            if let Some(t) = c.timing_ms {
                let _ = write!(out, " [{t} ms]");
            }
            out.push('\n');
            for (key, text) in [("value", &c.value), ("residual", &c.residual), ("error", &c.error)] {
                if let Some(text) = text {
                    for (i, line) in text.lines().enumerate() {
                        let head = if i == 0 { format!("{key}:") } else { String::new() };
                        let _ = writeln!(out, "      {head:<9} {line}");
                    }
                }
            }
        }
        let count = |s: Status| self.checks.iter().filter(|c| c.status == s).count();
        let _ = writeln!(
            out,
            "{} checks: {} passed, {} failed, {} errors",
            self.checks.len(),
            count(Status::Pass),
            count(Status::Fail),
            count(Status::Error)
        );
        out
    }
}
