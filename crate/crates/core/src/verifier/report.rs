use serde::{Deserialize, Serialize};

use crate::matrix::IntMatrix;

use super::atlas::{Closure, ExplorationAtlas};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

/// Outcome of one property check over an atlas.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub check: String,
    pub status: Status,
    pub seeds_covered: usize,
    #[serde(default)]
    pub failures: usize,
    /// Path of the first failing seed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness_path: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckRecord {
    pub fn skipped(check: &str, reason: &str) -> Self {
        Self {
            check: check.to_string(),
            status: Status::Skipped,
            seeds_covered: 0,
            failures: 0,
            witness_path: None,
            counterexample: None,
            note: Some(reason.to_string()),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// Accumulates per-seed outcomes for one check, keeping the first failure.
pub(crate) struct Tally {
    record: CheckRecord,
}

impl Tally {
    pub(crate) fn new(check: &str) -> Self {
        Self {
            record: CheckRecord {
                check: check.to_string(),
                status: Status::Pass,
                seeds_covered: 0,
                failures: 0,
                witness_path: None,
                counterexample: None,
                note: None,
            },
        }
    }

    pub(crate) fn seed(&mut self) {
        self.record.seeds_covered += 1;
    }

    pub(crate) fn fail(&mut self, path: &[usize], counterexample: serde_json::Value) {
        self.record.status = Status::Fail;
        self.record.failures += 1;
        if self.record.witness_path.is_none() {
            self.record.witness_path = Some(path.to_vec());
            self.record.counterexample = Some(counterexample);
        }
    }

    pub(crate) fn note(mut self, note: impl Into<String>) -> Self {
        self.record.note = Some(note.into());
        self
    }

    pub(crate) fn finish(self) -> CheckRecord {
        self.record
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExplorationSummary {
    pub depth_bound: usize,
    pub seeds: usize,
    pub cluster_variables: usize,
    pub layers: Vec<usize>,
    pub closure: Closure,
    pub symmetrizer: Option<Vec<i64>>,
    pub acyclic: bool,
}

impl ExplorationSummary {
    pub fn of(atlas: &ExplorationAtlas, symmetrizer: Option<Vec<i64>>, acyclic: bool) -> Self {
        Self {
            depth_bound: atlas.depth_bound(),
            seeds: atlas.len(),
            cluster_variables: atlas.cluster_variables().len(),
            layers: atlas.layers().to_vec(),
            closure: atlas.closure(),
            symmetrizer,
            acyclic,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

/// Exit code when every check passed.
pub const EXIT_OK: i32 = 0;
/// Exit code when some property check failed.
pub const EXIT_PROPERTY_FAILURE: i32 = 2;
/// Exit code for a truncated exploration when closure was required.
pub const EXIT_TRUNCATED: i32 = 3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub v: u32,
    #[serde(rename = "B0")]
    pub b0: IntMatrix,
    pub exploration: ExplorationSummary,
    pub checks: Vec<CheckRecord>,
    pub summary: Summary,
}

impl VerificationReport {
    pub fn new(b0: IntMatrix, exploration: ExplorationSummary, checks: Vec<CheckRecord>) -> Self {
        let mut summary = Summary::default();
        for c in &checks {
            match c.status {
                Status::Pass => summary.passed += 1,
                Status::Fail => summary.failed += 1,
                Status::Skipped => summary.skipped += 1,
            }
        }
        Self {
            v: 1,
            b0,
            exploration,
            checks,
            summary,
        }
    }

    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.check == name)
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn is_closed(&self) -> bool {
        matches!(self.exploration.closure, Closure::Closed { .. })
    }

    /// 0 when everything passed, 2 on any property failure, 3 when
    /// `require_closure` is set and the exploration was truncated.
    pub fn exit_code(&self, require_closure: bool) -> i32 {
        if !self.all_passed() {
            EXIT_PROPERTY_FAILURE
        } else if require_closure && !self.is_closed() {
            EXIT_TRUNCATED
        } else {
            EXIT_OK
        }
    }
}
