//! Machine-readable check reports and CSV sweep tables.

use std::fmt::Write as _;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Inconclusive => "INCONCLUSIVE",
        })
    }
}

/// Where an expected value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// Stated in the source publication.
    Reported,
    /// Recomputed with an independent high-precision oracle.
    Derived,
    /// Elementary closed form.
    Analytic,
}

/// How a measured value is compared with its expected value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `measured <= expected + tolerance`
    AtMost,
    /// `measured >= expected - tolerance`
    AtLeast,
    /// `|measured - expected| <= tolerance`
    Within,
    /// `measured` is finite
    Finite,
}

impl Relation {
    pub fn holds(self, measured: f64, expected: f64, tolerance: f64) -> bool {
        match self {
            Relation::AtMost => measured <= expected + tolerance,
            Relation::AtLeast => measured >= expected - tolerance,
            Relation::Within => (measured - expected).abs() <= tolerance,
            Relation::Finite => measured.is_finite(),
        }
    }
}

/// JSON has no infinities; non-finite values are written as strings.
mod float {
    use super::*;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "nan" => Ok(f64::NAN),
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                other => Err(serde::de::Error::custom(format!("not a number: {other}"))),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measured {
    pub name: String,
    #[serde(with = "float")]
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expected {
    pub name: String,
    #[serde(with = "float")]
    pub value: f64,
    pub provenance: Provenance,
    pub relation: Relation,
    pub tolerance: f64,
}

/// A plot-ready sweep table; `columns` names the entries of each row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Table {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{v:e}");
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_id: String,
    pub status: Status,
    pub measured: Vec<Measured>,
    pub expected: Vec<Expected>,
    pub runtime_ms: u64,
    pub seed: u64,
    pub tool_version: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<String>,
    /// Sweep tables, written separately as CSV.
    #[serde(skip)]
    pub tables: Vec<Table>,
}

impl CheckReport {
    /// Names of expected entries whose comparison fails.
    pub fn failures(&self) -> Vec<&str> {
        self.expected
            .iter()
            .filter(|e| {
                let m = self.measured.iter().find(|m| m.name == e.name);
                !m.is_some_and(|m| e.relation.holds(m.value, e.value, e.tolerance))
            })
            .map(|e| e.name.as_str())
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Totals over a suite run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub inconclusive: usize,
    pub seed: u64,
    pub tool_version: String,
    pub statuses: Vec<(String, Status)>,
}

impl Summary {
    pub fn from_reports(reports: &[CheckReport], seed: u64) -> Self {
        let count = |s: Status| reports.iter().filter(|r| r.status == s).count();
        Summary {
            total: reports.len(),
            passed: count(Status::Pass),
            failed: count(Status::Fail),
            inconclusive: count(Status::Inconclusive),
            seed,
            tool_version: TOOL_VERSION.to_string(),
            statuses: reports.iter().map(|r| (r.check_id.clone(), r.status)).collect(),
        }
    }

    pub fn any_failed(&self) -> bool {
        self.failed > 0
    }
}
