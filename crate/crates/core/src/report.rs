//! Law-check reports shared by every verification suite.

use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LawCheck {
    pub law: String,
    pub object: String,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LawReport {
    pub suite: String,
    pub category: String,
    pub bound: usize,
    pub checks: Vec<LawCheck>,
}

impl LawReport {
    pub fn new(suite: impl Into<String>, category: impl fmt::Display, bound: usize) -> Self {
        LawReport {
            suite: suite.into(),
            category: category.to_string(),
            bound,
            checks: Vec::new(),
        }
    }

    pub fn pass(&mut self, law: &str, object: impl fmt::Display) {
        self.checks.push(LawCheck {
            law: law.into(),
            object: object.to_string(),
            pass: true,
            counterexample: None,
        });
    }

    pub fn fail(&mut self, law: &str, object: impl fmt::Display, counterexample: Value) {
        self.checks.push(LawCheck {
            law: law.into(),
            object: object.to_string(),
            pass: false,
            counterexample: Some(counterexample),
        });
    }

    /// Records `pass` or, on failure, the lazily built counterexample.
    pub fn check(&mut self, law: &str, object: impl fmt::Display, ok: bool, counterexample: impl FnOnce() -> Value) {
        if ok {
            self.pass(law, object)
        } else {
            self.fail(law, object, counterexample())
        }
    }

    pub fn extend(&mut self, other: LawReport) {
        self.checks.extend(other.checks);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &LawCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn count(&self, law: &str) -> usize {
        self.checks.iter().filter(|c| c.law == law).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

impl fmt::Display for LawReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let failed = self.failures().count();
        writeln!(
            f,
            "{} on {} (bound {}): {} checks, {} failed",
            self.suite,
            self.category,
            self.bound,
            self.checks.len(),
            failed
        )?;
        for c in self.failures() {
            let ce = c.counterexample.as_ref().map(|v| v.to_string()).unwrap_or_default();
            writeln!(f, "  FAIL {} at {}: {}", c.law, c.object, ce)?;
        }
        Ok(())
    }
}

/// Serializes any encodable value for a counterexample.
pub fn cx<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("codes serialize")
}
