use std::collections::BTreeMap;
use std::path::Path;

use kantorovich_core::{all_passed, CheckRecord};
use serde::Serialize;

use crate::sampling::Estimate;

/// Tabulated curve for external plotting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Curve {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Curve {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn write_csv(&self, path: &Path) -> csv::Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| format!("{v:?}")))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Result of one seeded Monte-Carlo experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcentrationReport {
    pub experiment: String,
    pub samples: usize,
    pub seed: u64,
    pub parameters: BTreeMap<String, f64>,
    pub estimates: BTreeMap<String, Estimate>,
    pub checks: Vec<CheckRecord>,
    pub curves: Vec<Curve>,
    pub passed: bool,
}

impl ConcentrationReport {
    pub fn new(experiment: &str, samples: usize, seed: u64) -> Self {
        Self {
            experiment: experiment.into(),
            samples,
            seed,
            parameters: BTreeMap::new(),
            estimates: BTreeMap::new(),
            checks: Vec::new(),
            curves: Vec::new(),
            passed: true,
        }
    }

    pub fn param(&mut self, key: impl Into<String>, v: f64) {
        self.parameters.insert(key.into(), v);
    }

    pub fn estimate(&mut self, key: impl Into<String>, e: Estimate) {
        self.estimates.insert(key.into(), e);
    }

    pub fn check(&mut self, c: CheckRecord) {
        self.checks.push(c);
    }

    pub fn get(&self, key: &str) -> Option<Estimate> {
        self.estimates.get(key).copied()
    }

    pub fn find_check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Sorts checks by name and settles the overall verdict.
    pub fn finish(mut self) -> Self {
        self.checks.sort_by(|a, b| a.name.cmp(&b.name));
        self.passed = all_passed(&self.checks);
        self
    }
}
