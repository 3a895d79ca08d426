//! Pass/fail records produced by the verification suites.

use serde::Serialize;
use std::time::Duration;

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct CheckEntry {
    /// Human-readable identity, e.g. `[A,C] relation`.
    pub name: String,
    /// Stable machine-readable key, e.g. `q3.ac_relation`.
    pub anchor: String,
    pub passed: bool,
    /// Number of terms left in the residual (0 when the identity holds).
    pub residual_terms: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl CheckEntry {
    pub fn new(name: &str, anchor: &str, residual_terms: usize) -> Self {
        CheckEntry {
            name: name.to_string(),
            anchor: anchor.to_string(),
            passed: residual_terms == 0,
            residual_terms,
            detail: None,
            wall_time: Duration::ZERO,
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct VerificationReport {
    pub suite: String,
    pub total: usize,
    pub first: usize,
    pub mode: String,
    pub entries: Vec<CheckEntry>,
    /// Observations about printed formulas that needed a correction.
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn new(suite: &str, total: usize, first: usize, mode: &str) -> Self {
        VerificationReport {
            suite: suite.to_string(),
            total,
            first,
            mode: mode.to_string(),
            entries: Vec::new(),
            notes: Vec::new(),
        }
    }

    /// Sorts entries by anchor so that parallel runs give identical output.
    pub fn finish(mut self) -> Self {
        self.entries.sort_by(|a, b| a.anchor.cmp(&b.anchor));
        self.notes.sort();
        self.notes.dedup();
        self
    }

    pub fn all_passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckEntry> {
        self.entries.iter().filter(|e| !e.passed)
    }

    pub fn entry(&self, anchor: &str) -> Option<&CheckEntry> {
        self.entries.iter().find(|e| e.anchor == anchor)
    }
}
