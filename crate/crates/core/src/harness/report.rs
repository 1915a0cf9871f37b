use std::time::Duration;

use serde::Serialize;

use super::config::SCHEMA_VERSION;

/// One named comparison of a residual against a tolerance.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Wall-clock time; left out of serialized reports so that they stay
    /// byte-identical across runs.
    #[serde(skip)]
    pub runtime: Duration,
}

impl Check {
    /// Passes when `residual ≤ tolerance`; NaN fails.
    pub fn below(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Check { name: name.into(), residual, tolerance, passed: residual <= tolerance, error: None, runtime: Duration::ZERO }
    }

    /// Boolean outcome recorded as residual 0 (true) or 1 (false).
    pub fn flag(name: impl Into<String>, ok: bool) -> Self {
        Check::below(name, if ok { 0.0 } else { 1.0 }, 0.5)
    }

    pub fn failed(name: impl Into<String>, error: impl ToString) -> Self {
        Check {
            name: name.into(),
            residual: f64::NAN,
            tolerance: 0.0,
            passed: false,
            error: Some(error.to_string()),
            runtime: Duration::ZERO,
        }
    }

    pub fn timed(mut self, runtime: Duration) -> Self {
        self.runtime = runtime;
        self
    }
}

/// Checks of one run with the aggregate verdict.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub subcommand: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub checks: Vec<Check>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<serde_json::Value>,
}

impl RunReport {
    pub fn new(subcommand: &str) -> Self {
        RunReport { schema_version: SCHEMA_VERSION, subcommand: subcommand.into(), seed: None, checks: vec![], passed: true, result: None }
    }

    pub fn push(&mut self, c: Check) {
        self.passed &= c.passed;
        self.checks.push(c);
    }

    /// Records either the check or the error that prevented it.
    pub fn push_result(&mut self, name: &str, r: crate::Result<Check>) {
        self.push(r.unwrap_or_else(|e| Check::failed(name, e)));
    }

    pub fn with_result<T: Serialize>(mut self, value: &T) -> Self {
        self.result = serde_json::to_value(value).ok();
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aggregate_and_nan() {
        let mut r = RunReport::new("x");
        r.push(Check::below("a", 1e-12, 1e-10));
        assert!(r.passed);
        r.push(Check::below("b", f64::NAN, 1.0));
        assert!(!r.passed);
        let json = r.to_json();
        assert!(!json.contains("runtime"));
        assert!(json.contains("null"));
    }
}
