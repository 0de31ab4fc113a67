//! Machine-readable verification reports.

use serde::Serialize;
use serde::Serializer;
use serde_json::{json, Value};

use crate::fock::IdentityReport;

/// Size of a mismatch: exactly zero, or a measured magnitude.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Discrepancy {
    ExactZero,
    Value(f64),
}

impl Serialize for Discrepancy {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Discrepancy::ExactZero => s.serialize_str("exact-0"),
            Discrepancy::Value(v) => s.serialize_f64(*v),
        }
    }
}

impl From<&IdentityReport> for Discrepancy {
    fn from(r: &IdentityReport) -> Self {
        if r.exact && r.pass {
            Discrepancy::ExactZero
        } else {
            Discrepancy::Value(r.max_discrepancy)
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Instance {
    pub id: String,
    pub pass: bool,
    pub discrepancy: Discrepancy,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub details: Value,
}

impl Instance {
    pub fn new(id: impl Into<String>, pass: bool, discrepancy: Discrepancy) -> Self {
        Instance {
            id: id.into(),
            pass,
            discrepancy,
            details: Value::Null,
        }
    }

    pub fn from_identity(id: impl Into<String>, r: &IdentityReport) -> Self {
        Instance::new(id, r.pass, r.into())
            .with_details(json!({ "columns": r.columns, "margin": r.margin }))
    }

    pub fn with_details(mut self, details: Value) -> Self {
        self.details = details;
        self
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

/// `{suite, config, instances, summary}`, plus `runtimeMillis` when timed.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub suite: String,
    pub config: Value,
    pub instances: Vec<Instance>,
    pub summary: Summary,
    /// Computed values that are not pass/fail checks.
    #[serde(skip_serializing_if = "Value::is_null")]
    pub data: Value,
    #[serde(rename = "runtimeMillis", skip_serializing_if = "Option::is_none")]
    pub runtime_millis: Option<u64>,
}

impl Report {
    pub fn new(suite: impl Into<String>, config: Value, instances: Vec<Instance>) -> Self {
        let passed = instances.iter().filter(|i| i.pass).count();
        let summary = Summary {
            total: instances.len(),
            passed,
            failed: instances.len() - passed,
        };
        Report {
            suite: suite.into(),
            config,
            instances,
            summary,
            data: Value::Null,
            runtime_millis: None,
        }
    }

    pub fn with_data(mut self, data: Value) -> Self {
        self.data = data;
        self
    }

    pub fn all_pass(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

/// JSON form of any serializable scalar.
pub fn to_json<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("scalars serialize")
}
