//! Verification reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::config_file::ConfigFile;
use crate::suite::CheckName;

/// Bumped whenever a field changes meaning or disappears.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: CheckName,
    /// Residual or deviation; the check passes when it is at most the
    /// tolerance.
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
    /// Where the largest residual occurred, for pointwise checks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub worst_point: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, serde_json::Value>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: Vec<CheckName>,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub manifest_sha256: String,
    pub artifact: String,
    pub version: String,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub config: ConfigFile,
    pub checks: Vec<CheckRecord>,
    pub summary: Summary,
    pub provenance: Provenance,
}

impl VerificationReport {
    pub fn new(config: ConfigFile, checks: Vec<CheckRecord>, provenance: Provenance) -> Self {
        let failed: Vec<CheckName> = checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name)
            .collect();
        let summary = Summary {
            total: checks.len(),
            passed: checks.len() - failed.len(),
            verdict: if failed.is_empty() {
                Verdict::Pass
            } else {
                Verdict::Fail
            },
            failed,
        };
        VerificationReport {
            schema_version: SCHEMA_VERSION,
            config,
            checks,
            summary,
            provenance,
        }
    }

    pub fn passed(&self) -> bool {
        self.summary.verdict == Verdict::Pass
    }

    pub fn check(&self, name: CheckName) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// One line per check plus a verdict line. `timings` are wall times in
    /// milliseconds, in check order, when available.
    pub fn human_summary(&self, timings: Option<&[f64]>) -> String {
        let width = self
            .checks
            .iter()
            .map(|c| c.name.as_str().len())
            .max()
            .unwrap_or(0);
        let mut out = String::new();
        for (i, c) in self.checks.iter().enumerate() {
            let status = if c.passed { "PASS" } else { "FAIL" };
            let _ = write!(
                out,
                "{status}  {:width$}  value {:<12.3e} tol {:<9.1e} n={}",
                c.name.as_str(),
                c.value,
                c.tolerance,
                c.samples,
            );
            if let Some(t) = timings.and_then(|t| t.get(i)) {
                let _ = write!(out, "  {t:.0} ms");
            }
            if let (false, Some(p)) = (c.passed, c.worst_point) {
                let _ = write!(out, "  worst at ({:.6}, {:.6}, {:.6})", p[0], p[1], p[2]);
            }
            out.push('\n');
        }
        let _ = writeln!(
            out,
            "{}: {}/{} checks passed",
            if self.passed() { "PASS" } else { "FAIL" },
            self.summary.passed,
            self.summary.total
        );
        out
    }
}
