//! Pass/fail records shared by every experiment report.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `value ≤ bound + tolerance`
    AtMost,
    /// `value ≥ bound − tolerance`
    AtLeast,
    /// `|value − bound| ≤ tolerance`
    Near,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub tolerance: f64,
    pub relation: Relation,
    pub passed: bool,
    /// A failure is the predicted outcome (hypothesis deliberately violated).
    #[serde(default)]
    pub expected_failure: bool,
}

impl CheckRecord {
    pub fn new(name: impl Into<String>, value: f64, bound: f64, tolerance: f64, relation: Relation) -> Self {
        let passed = match relation {
            Relation::AtMost => value <= bound + tolerance,
            Relation::AtLeast => value >= bound - tolerance,
            Relation::Near => (value - bound).abs() <= tolerance,
        };
        Self { name: name.into(), value, bound, tolerance, relation, passed, expected_failure: false }
    }

    pub fn at_most(name: impl Into<String>, value: f64, bound: f64, tolerance: f64) -> Self {
        Self::new(name, value, bound, tolerance, Relation::AtMost)
    }

    pub fn at_least(name: impl Into<String>, value: f64, bound: f64, tolerance: f64) -> Self {
        Self::new(name, value, bound, tolerance, Relation::AtLeast)
    }

    pub fn near(name: impl Into<String>, value: f64, target: f64, tolerance: f64) -> Self {
        Self::new(name, value, target, tolerance, Relation::Near)
    }

    /// A boolean condition recorded as `1 ≥ 1` or `0 ≥ 1`.
    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self::at_least(name, if ok { 1.0 } else { 0.0 }, 1.0, 0.0)
    }

    pub fn expecting_failure(mut self) -> Self {
        self.expected_failure = true;
        self
    }
}

/// True when every check passed, ignoring those marked as expected failures.
pub fn all_passed<'a>(checks: impl IntoIterator<Item = &'a CheckRecord>) -> bool {
    checks.into_iter().all(|c| c.passed || c.expected_failure)
}
