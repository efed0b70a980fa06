//! Structured verdicts and numeric evidence, serializable to JSON.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Answer {
    Yes,
    No,
    Inconclusive,
}

impl Answer {
    pub fn from_bool(b: bool) -> Answer {
        if b {
            Answer::Yes
        } else {
            Answer::No
        }
    }
}

/// JSON number, or a string for non-finite values so reports stay lossless.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::from(x)
    } else if x.is_nan() {
        Value::from("nan")
    } else if x > 0.0 {
        Value::from("+inf")
    } else {
        Value::from("-inf")
    }
}

mod lossless_f64 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else {
            s.serialize_str(if x.is_nan() { "nan" } else if *x > 0.0 { "+inf" } else { "-inf" })
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            N(f64),
            S(String),
        }
        Ok(match Repr::deserialize(d)? {
            Repr::N(x) => x,
            Repr::S(s) => match s.as_str() {
                "+inf" => f64::INFINITY,
                "-inf" => f64::NEG_INFINITY,
                _ => f64::NAN,
            },
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub criterion: String,
    pub answer: Answer,
    pub evidence: BTreeMap<String, Value>,
}

impl Verdict {
    pub fn new(criterion: impl Into<String>, answer: Answer) -> Verdict {
        Verdict { criterion: criterion.into(), answer, evidence: BTreeMap::new() }
    }

    pub fn with(mut self, key: &str, v: impl Into<Value>) -> Verdict {
        self.evidence.insert(key.to_string(), v.into());
        self
    }

    pub fn with_num(self, key: &str, x: f64) -> Verdict {
        self.with(key, num(x))
    }

    pub fn is_yes(&self) -> bool {
        self.answer == Answer::Yes
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub name: String,
    #[serde(with = "lossless_f64")]
    pub value: f64,
    pub tol: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Provenance {
    pub seed: u64,
    pub tol: f64,
    pub samples: usize,
    pub grids: BTreeMap<String, usize>,
    pub version: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timestamp: Option<String>,
}

impl Provenance {
    pub fn new(seed: u64, tol: f64, samples: usize) -> Provenance {
        Provenance { seed, tol, samples, grids: BTreeMap::new(), version: env!("CARGO_PKG_VERSION").to_string(), timestamp: None }
    }
}

/// Verdicts, residual table and provenance of one verification or decision run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosisReport {
    pub schema_version: u32,
    pub command: String,
    pub outcome: Answer,
    pub verdicts: Vec<Verdict>,
    pub residuals: Vec<Residual>,
    pub provenance: Provenance,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl DiagnosisReport {
    pub fn new(command: impl Into<String>, provenance: Provenance) -> DiagnosisReport {
        DiagnosisReport {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            outcome: Answer::Yes,
            verdicts: Vec::new(),
            residuals: Vec::new(),
            provenance,
            notes: Vec::new(),
        }
    }

    /// Records a residual; NaN never passes.
    pub fn residual(&mut self, name: &str, value: f64, tol: f64) -> bool {
        let passed = value <= tol;
        self.residuals.push(Residual { name: name.to_string(), value, tol, passed });
        passed
    }

    pub fn verdict(&mut self, v: Verdict) {
        self.verdicts.push(v);
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn residual_value(&self, name: &str) -> Option<f64> {
        self.residuals.iter().find(|r| r.name == name).map(|r| r.value)
    }

    pub fn find(&self, criterion: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.criterion == criterion)
    }

    pub fn all_residuals_pass(&self) -> bool {
        self.residuals.iter().all(|r| r.passed)
    }

    /// Outcome from residuals alone: yes iff every residual passed.
    pub fn settle_by_residuals(&mut self) -> Answer {
        self.outcome = Answer::from_bool(self.all_residuals_pass());
        self.outcome
    }

    pub fn passed(&self) -> bool {
        self.outcome == Answer::Yes
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> serde_json::Result<DiagnosisReport> {
        serde_json::from_str(s)
    }
}
