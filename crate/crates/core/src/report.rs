//! Structured results of verification runs.
//!
//! A sweep accumulates a [`Tally`] per fixed-size work chunk; chunks are
//! merged in index order, so the final [`CheckReport`] does not depend on
//! how many threads ran them.

use std::collections::BTreeMap;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Stored witnesses per report; the full count is kept in
/// `violation_count`.
pub const MAX_STORED_VIOLATIONS: usize = 1000;

/// One failing (or, for searches, succeeding) input together with the
/// values observed on it. Inputs use the text formats of [`crate::text`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub inputs: Vec<String>,
    pub observed: BTreeMap<String, Value>,
}

/// The declared universe of a run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Universe {
    pub description: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ring: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub bound: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub check: String,
    pub universe: Universe,
    pub total_checked: u64,
    pub violation_count: u64,
    pub violations: Vec<Violation>,
    pub witness: Option<Violation>,
    pub stats: BTreeMap<String, Value>,
    pub elapsed: Duration,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.violation_count == 0
    }

    /// Serialized form. `config` is echoed verbatim.
    pub fn to_document(&self, config: Value) -> ReportDocument {
        ReportDocument {
            check: self.check.clone(),
            universe: self.universe.clone(),
            config,
            total_checked: self.total_checked,
            violation_count: self.violation_count,
            violations: self.violations.clone(),
            witness: self.witness.clone(),
            stats: self.stats.clone(),
            elapsed_ms: self.elapsed.as_millis() as u64,
            version: crate::VERSION.to_string(),
        }
    }
}

/// The JSON schema of a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub check: String,
    pub universe: Universe,
    #[serde(default)]
    pub config: Value,
    pub total_checked: u64,
    pub violation_count: u64,
    pub violations: Vec<Violation>,
    pub witness: Option<Violation>,
    #[serde(default)]
    pub stats: BTreeMap<String, Value>,
    pub elapsed_ms: u64,
    pub version: String,
}

impl ReportDocument {
    pub fn passed(&self) -> bool {
        self.violation_count == 0
    }
}

/// Mergeable partial result of a sweep.
#[derive(Debug, Clone, Default)]
pub struct Tally {
    pub checked: u64,
    pub violation_count: u64,
    pub violations: Vec<Violation>,
    pub counters: BTreeMap<&'static str, u64>,
    pub minima: BTreeMap<&'static str, f64>,
    pub maxima: BTreeMap<&'static str, f64>,
}

impl Tally {
    pub fn count(&mut self, key: &'static str) {
        *self.counters.entry(key).or_default() += 1;
    }

    pub fn observe_min(&mut self, key: &'static str, x: f64) {
        let slot = self.minima.entry(key).or_insert(f64::INFINITY);
        *slot = slot.min(x);
    }

    pub fn observe_max(&mut self, key: &'static str, x: f64) {
        let slot = self.maxima.entry(key).or_insert(f64::NEG_INFINITY);
        *slot = slot.max(x);
    }

    pub fn violation(&mut self, v: Violation) {
        self.violation_count += 1;
        if self.violations.len() < MAX_STORED_VIOLATIONS {
            self.violations.push(v);
        }
    }

    pub fn merge(mut self, other: Tally) -> Tally {
        self.checked += other.checked;
        self.violation_count += other.violation_count;
        for v in other.violations {
            if self.violations.len() >= MAX_STORED_VIOLATIONS {
                break;
            }
            self.violations.push(v);
        }
        for (k, c) in other.counters {
            *self.counters.entry(k).or_default() += c;
        }
        for (k, x) in other.minima {
            self.observe_min(k, x);
        }
        for (k, x) in other.maxima {
            self.observe_max(k, x);
        }
        self
    }

    pub fn into_report(self, check: &str, universe: Universe, elapsed: Duration) -> CheckReport {
        let mut stats = BTreeMap::new();
        for (k, c) in self.counters {
            stats.insert(k.to_string(), Value::from(c));
        }
        for (k, x) in self.minima {
            stats.insert(format!("min_{k}"), Value::from(x));
        }
        for (k, x) in self.maxima {
            stats.insert(format!("max_{k}"), Value::from(x));
        }
        CheckReport {
            check: check.to_string(),
            universe,
            total_checked: self.checked,
            violation_count: self.violation_count,
            violations: self.violations,
            witness: None,
            stats,
            elapsed,
        }
    }
}

/// Observed values builder.
#[derive(Debug, Default)]
pub struct Observed(pub BTreeMap<String, Value>);

impl Observed {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.0.insert(key.to_string(), value.into());
        self
    }

    pub fn into_violation(self, inputs: Vec<String>) -> Violation {
        Violation { inputs, observed: self.0 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: u64) -> Violation {
        Observed::new().with("i", i).into_violation(vec![])
    }

    #[test]
    fn merge_is_associative() {
        let mk = |base: u64| {
            let mut t = Tally { checked: base, ..Tally::default() };
            t.count("x");
            t.observe_min("p", base as f64);
            t.observe_max("p", base as f64);
            t.violation(v(base));
            t
        };
        let left = mk(1).merge(mk(2)).merge(mk(3));
        let right = mk(1).merge(mk(2).merge(mk(3)));
        let (l, r) = (
            left.into_report("t", Universe::default(), Duration::ZERO),
            right.into_report("t", Universe::default(), Duration::ZERO),
        );
        assert_eq!(l, r);
        assert_eq!(l.total_checked, 6);
        assert_eq!(l.stats["min_p"], Value::from(1.0));
        assert_eq!(l.stats["max_p"], Value::from(3.0));
        assert_eq!(l.violations.len(), 3);
    }

    #[test]
    fn stored_violations_are_capped() {
        let mut t = Tally::default();
        for i in 0..(MAX_STORED_VIOLATIONS as u64 + 10) {
            t.checked += 1;
            t.violation(v(i));
        }
        assert_eq!(t.violation_count, MAX_STORED_VIOLATIONS as u64 + 10);
        assert_eq!(t.violations.len(), MAX_STORED_VIOLATIONS);
        assert!(t.checked >= t.violations.len() as u64);
    }
}
