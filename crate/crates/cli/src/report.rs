//! Reports emitted by every subcommand.

use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// One check. `status` is always `residual ≤ tolerance`; boolean checks use
/// residual 0 or 1 against tolerance 0, counts use the count itself.
#[derive(Clone, Debug, Serialize)]
pub struct Record {
    pub name: String,
    pub status: Status,
    pub residual: f64,
    pub tolerance: f64,
}

impl Record {
    pub fn new(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        // NaN residuals fail.
        let status = if residual <= tolerance { Status::Pass } else { Status::Fail };
        Record {
            name: name.into(),
            status,
            residual,
            tolerance,
        }
    }

    pub fn flag(name: impl Into<String>, ok: bool) -> Self {
        Record::new(name, if ok { 0.0 } else { 1.0 }, 0.0)
    }

    pub fn count(name: impl Into<String>, failures: usize) -> Self {
        Record::new(name, failures as f64, 0.0)
    }

    /// `lhs ≤ rhs` recorded as the ratio against 1.
    pub fn bound(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        let ratio = if lhs == 0.0 { 0.0 } else { lhs / rhs };
        Record::new(name, ratio, 1.0)
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: Vec<String>,
    pub seed: u64,
    pub records: Vec<Record>,
    /// Command-specific payload: certified matrices, spectra, tables.
    #[serde(skip_serializing_if = "Value::is_null")]
    pub data: Value,
    pub wall_time_s: f64,
}

impl RunReport {
    pub fn new(command: Vec<String>, seed: u64) -> Self {
        RunReport {
            command,
            seed,
            records: Vec::new(),
            data: Value::Null,
            wall_time_s: 0.0,
        }
    }

    pub fn push(&mut self, r: Record) {
        self.records.push(r);
    }

    pub fn extend(&mut self, rs: impl IntoIterator<Item = Record>) {
        self.records.extend(rs);
    }

    pub fn passed(&self) -> bool {
        self.records.iter().all(Record::passed)
    }

    pub fn failures(&self) -> usize {
        self.records.iter().filter(|r| !r.passed()).count()
    }

    /// Plain-text rendering: one line per record and a summary.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            let tag = if r.passed() { "PASS" } else { "FAIL" };
            out.push_str(&format!("{tag}  {}: {:.3e} (tol {:.1e})\n", r.name, r.residual, r.tolerance));
        }
        if !self.data.is_null() {
            out.push_str(&serde_json::to_string_pretty(&self.data).expect("report data serializes"));
            out.push('\n');
        }
        out.push_str(&format!(
            "{} of {} checks pass ({:.2}s)\n",
            self.records.len() - self.failures(),
            self.records.len(),
            self.wall_time_s
        ));
        out
    }
}
