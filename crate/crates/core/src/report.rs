//! JSON run reports shared by every command.

use serde::Serialize;
use serde_json::{Map, Value};

use crate::oracle::Tally;

pub const SCHEMA: &str = "flowspace.report/1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail { witness: String },
    Skipped { reason: String },
}

impl Verdict {
    pub fn is_fail(&self) -> bool {
        matches!(self, Verdict::Fail { .. })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub verdict: Verdict,
    pub cases: u64,
    pub failures: u64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn from_tally(name: &str, tally: Tally) -> Self {
        let verdict = match (&tally.witness, tally.cases) {
            (Some(w), _) => Verdict::Fail { witness: w.clone() },
            (None, 0) => Verdict::Skipped { reason: "no applicable cases".into() },
            (None, _) => Verdict::Pass,
        };
        CheckReport { name: name.into(), verdict, cases: tally.cases, failures: tally.failures, notes: Vec::new() }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub checks: Vec<CheckReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    pub command: String,
    pub parameters: Map<String, Value>,
    pub suites: Vec<SuiteReport>,
    #[serde(skip_serializing_if = "Map::is_empty")]
    pub tables: Map<String, Value>,
    pub verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u128>,
}

impl RunReport {
    pub fn new(command: &str, parameters: Map<String, Value>, suites: Vec<SuiteReport>) -> Self {
        let mut report = RunReport {
            schema: SCHEMA,
            command: command.into(),
            parameters,
            suites,
            tables: Map::new(),
            verdict: "pass",
            wall_time_ms: None,
        };
        report.refresh_verdict();
        report
    }

    pub fn refresh_verdict(&mut self) {
        self.verdict = if self.failed() { "fail" } else { "pass" };
    }

    pub fn failed(&self) -> bool {
        self.suites.iter().flat_map(|s| &s.checks).any(|c| c.verdict.is_fail())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}
