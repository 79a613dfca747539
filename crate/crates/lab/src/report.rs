use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::LabResult;
use crate::formats::write_json;

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub version: String,
    pub config: RunConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// A stage that failed without aborting the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageError {
    pub stage: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub manifest: Manifest,
    pub checks: Vec<Check>,
    pub metrics: BTreeMap<String, f64>,
    pub files: Vec<String>,
    pub warnings: Vec<String>,
    pub stage_errors: Vec<StageError>,
}

impl ExperimentReport {
    pub fn new(command: &str, config: &RunConfig) -> Self {
        ExperimentReport {
            manifest: Manifest { command: command.into(), version: ARTIFACT_VERSION.into(), config: config.clone() },
            checks: Vec::new(),
            metrics: BTreeMap::new(),
            files: Vec::new(),
            warnings: Vec::new(),
            stage_errors: Vec::new(),
        }
    }

    /// Records a verdict; each check name may appear once.
    pub fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        assert!(self.checks.iter().all(|c| c.name != name), "check `{name}` recorded twice");
        self.checks.push(Check { name: name.into(), passed, detail: detail.into() });
    }

    pub fn metric(&mut self, name: impl Into<String>, value: f64) {
        self.metrics.insert(name.into(), value);
    }

    pub fn stage_error(&mut self, stage: impl Into<String>, message: impl Into<String>) {
        self.stage_errors.push(StageError { stage: stage.into(), message: message.into() });
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed) && self.stage_errors.is_empty()
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Writes `report.json` into `dir` and lists it in the inventory.
    pub fn write(&mut self, dir: &Path) -> LabResult<()> {
        let name = "report.json".to_string();
        if !self.files.contains(&name) {
            self.files.push(name.clone());
        }
        write_json(&dir.join(name), self)
    }

    /// One line per check.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!("{} {}: {}\n", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail));
        }
        for e in &self.stage_errors {
            out.push_str(&format!("ERROR {}: {}\n", e.stage, e.message));
        }
        out
    }
}
