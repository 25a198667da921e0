//! Experiment reports and their append-only files.

use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use kantorovich_core::{all_passed, CheckRecord};
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::config::{ExperimentConfig, Kind};
use crate::runner::Outcome;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub kind: Kind,
    pub tool: String,
    pub tool_version: String,
    pub config: ExperimentConfig,
    pub config_hash: String,
    /// Sorted by name.
    pub checks: Vec<CheckRecord>,
    pub results: Value,
    pub passed: bool,
    pub wall_clock_seconds: f64,
}

impl ExperimentReport {
    pub fn new(kind: Kind, config: ExperimentConfig, outcome: &Outcome, wall_clock_seconds: f64) -> Self {
        let mut checks = outcome.checks.clone();
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        Self {
            kind,
            tool: "kantorovich-lab".into(),
            tool_version: TOOL_VERSION.into(),
            config_hash: config_hash(&config),
            passed: all_passed(&checks),
            checks,
            config,
            results: outcome.results.clone(),
            wall_clock_seconds,
        }
    }

    /// Pretty JSON with `wall_clock_seconds` zeroed, for reproducibility checks.
    pub fn canonical_json(&self) -> String {
        let mut r = self.clone();
        r.wall_clock_seconds = 0.0;
        r.to_json()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.passed && !c.expected_failure)
    }
}

/// First 16 hex digits of the SHA-256 of the compact config JSON.
pub fn config_hash(config: &ExperimentConfig) -> String {
    let bytes = serde_json::to_vec(config).expect("config serializes");
    hex::encode(Sha256::digest(&bytes))[..16].to_string()
}

/// Files written for one run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Written {
    pub report: PathBuf,
    pub curves: Vec<PathBuf>,
}

/// Writes `<kind>-<hash>.json` into `dir`, or `<kind>-<hash>.<k>.json` with
/// the first free `k` when earlier runs exist. Existing files are never
/// replaced. Curves go next to the report as `<stem>.<curve>.csv`.
pub fn write_report(dir: &Path, report: &ExperimentReport, outcome: &Outcome) -> std::io::Result<Written> {
    fs::create_dir_all(dir)?;
    let base = format!("{}-{}", report.kind, report.config_hash);
    let mut k = 0u32;
    let (stem, mut file) = loop {
        let stem = if k == 0 { base.clone() } else { format!("{base}.{k}") };
        match OpenOptions::new().write(true).create_new(true).open(dir.join(format!("{stem}.json"))) {
            Ok(f) => break (stem, f),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => k += 1,
            Err(e) => return Err(e),
        }
    };
    file.write_all(report.to_json().as_bytes())?;
    file.write_all(b"\n")?;
    let mut curves = Vec::new();
    for c in &outcome.curves {
        let path = dir.join(format!("{stem}.{}.csv", c.name));
        c.write_csv(&path).map_err(std::io::Error::other)?;
        curves.push(path);
    }
    Ok(Written { report: dir.join(format!("{stem}.json")), curves })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::diagnose;
    use proptest::prelude::*;

    fn config(seed: u64) -> ExperimentConfig {
        let text = format!(r#"{{"kind": "counterexample", "seed": {seed}, "parameters": {{"f": [[2, 1]]}}}}"#);
        diagnose(&text, None, None, Path::new(".")).unwrap().config
    }

    #[test]
    fn hash_is_sixteen_hex_digits() {
        let h = config_hash(&config(1));
        assert_eq!(h.len(), 16);
        assert!(h.chars().all(|c| c.is_ascii_hexdigit()));
        assert_eq!(h, config_hash(&config(1)));
    }

    #[test]
    fn canonical_json_ignores_the_clock() {
        let outcome = Outcome {
            results: Value::Null,
            checks: vec![CheckRecord::holds("b", true), CheckRecord::holds("a", false)],
            curves: vec![],
        };
        let a = ExperimentReport::new(Kind::Counterexample, config(1), &outcome, 1.5);
        let b = ExperimentReport::new(Kind::Counterexample, config(1), &outcome, 7.0);
        assert_eq!(a.canonical_json(), b.canonical_json());
        assert_eq!(a.checks[0].name, "a");
        assert!(!a.passed);
        assert_eq!(a.failed_checks().count(), 1);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn distinct_seeds_hash_apart(a: u64, b: u64) {
            prop_assume!(a != b);
            prop_assert_ne!(config_hash(&config(a)), config_hash(&config(b)));
        }
    }
}
