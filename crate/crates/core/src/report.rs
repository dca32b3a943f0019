//! Residual reports shared by the certificates and the command line.

use serde::{Deserialize, Serialize};

/// One certified quantity. By default a check passes when
/// `residual ≤ tolerance`; a lower-bound check passes when
/// `residual ≥ tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub lower_bound: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            residual,
            tolerance,
            pass: residual <= tolerance,
            lower_bound: false,
        }
    }

    pub fn at_least(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            residual: value,
            tolerance: threshold,
            pass: value >= threshold,
            lower_bound: true,
        }
    }
}

/// Named collection of checks, serialized as
/// `{subspace, checks: [{name, residual, tolerance, pass}], …}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub subspace: String,
    pub checks: Vec<Check>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Certificate {
    pub fn new(subspace: impl Into<String>) -> Self {
        Self {
            subspace: subspace.into(),
            checks: Vec::new(),
            seed: None,
            notes: Vec::new(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn extend(&mut self, other: Certificate) {
        self.checks.extend(other.checks);
        self.notes.extend(other.notes);
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificates are plain data")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_and_json_shape() {
        let mut c = Certificate::new("demo");
        c.push(Check::at_most("a", 1e-14, 1e-12));
        assert!(c.pass());
        c.push(Check::at_least("gap", 0.05, 0.1));
        assert!(!c.pass());
        let v: serde_json::Value = serde_json::from_str(&c.to_json()).unwrap();
        assert_eq!(v["subspace"], "demo");
        assert_eq!(v["checks"][0]["pass"], true);
        assert!(v["checks"][0].get("lower_bound").is_none());
        assert_eq!(v["checks"][1]["lower_bound"], true);
        assert!(v.get("seed").is_none());
        let back: Certificate = serde_json::from_str(&c.to_json()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn nan_never_passes() {
        assert!(!Check::at_most("x", f64::NAN, 1.0).pass);
        assert!(!Check::at_least("x", f64::NAN, 1.0).pass);
    }
}
