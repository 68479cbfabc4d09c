//! Machine-readable verification report.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::format::fmt_g;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub expected: String,
    pub actual: String,
    pub tolerance: String,
    pub status: Status,
}

impl CheckResult {
    /// `|actual - expected| <= tolerance`.
    pub fn near(name: impl Into<String>, expected: f64, actual: f64, tolerance: f64) -> Self {
        let ok = (actual - expected).abs() <= tolerance;
        CheckResult {
            name: name.into(),
            expected: fmt_g(expected),
            actual: fmt_g(actual),
            tolerance: fmt_g(tolerance),
            status: if ok { Status::Pass } else { Status::Fail },
        }
    }

    /// `actual <= bound`.
    pub fn below(name: impl Into<String>, actual: f64, bound: f64) -> Self {
        CheckResult {
            name: name.into(),
            expected: format!("<= {}", fmt_g(bound)),
            actual: fmt_g(actual),
            tolerance: fmt_g(bound),
            status: if actual <= bound { Status::Pass } else { Status::Fail },
        }
    }

    /// `actual > bound`.
    pub fn above(name: impl Into<String>, actual: f64, bound: f64) -> Self {
        CheckResult {
            name: name.into(),
            expected: format!("> {}", fmt_g(bound)),
            actual: fmt_g(actual),
            tolerance: fmt_g(bound),
            status: if actual > bound { Status::Pass } else { Status::Fail },
        }
    }

    pub fn error(name: impl Into<String>, err: impl std::fmt::Display) -> Self {
        CheckResult {
            name: name.into(),
            expected: "success".into(),
            actual: format!("error: {err}"),
            tolerance: String::new(),
            status: Status::Fail,
        }
    }
}

/// `diff_val` and `diff_vec` for one `(n, sigma)`.
#[derive(Debug, Clone, Serialize)]
pub struct LimitMetrics {
    pub n: usize,
    pub sigma: f64,
    pub diff_val: f64,
    pub diff_vec: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub checks: Vec<CheckResult>,
    pub metrics: Vec<LimitMetrics>,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    pub wall_time_s: f64,
}

impl RunReport {
    pub fn new(command: impl Into<String>, parameters: BTreeMap<String, String>) -> Self {
        RunReport {
            command: command.into(),
            parameters,
            checks: Vec::new(),
            metrics: Vec::new(),
            passed: 0,
            failed: 0,
            skipped: 0,
            wall_time_s: 0.0,
        }
    }

    pub fn push(&mut self, check: CheckResult) {
        match check.status {
            Status::Pass => self.passed += 1,
            Status::Fail => self.failed += 1,
            Status::Skipped => self.skipped += 1,
        }
        self.checks.push(check);
    }

    pub fn extend(&mut self, checks: impl IntoIterator<Item = CheckResult>) {
        for c in checks {
            self.push(c);
        }
    }

    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is serializable");
        s.push('\n');
        s
    }

    /// One line per check, then a summary line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let tag = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Skipped => "SKIP",
            };
            out.push_str(&format!(
                "{tag} {} actual={} expected={} tol={}\n",
                c.name, c.actual, c.expected, c.tolerance
            ));
        }
        for m in &self.metrics {
            out.push_str(&format!(
                "metrics n={} sigma={} diff_val={} diff_vec={}\n",
                m.n,
                fmt_g(m.sigma),
                fmt_g(m.diff_val),
                m.diff_vec.map_or("not-applicable".to_string(), fmt_g)
            ));
        }
        out.push_str(&format!(
            "{} passed, {} failed, {} skipped in {:.2} s\n",
            self.passed, self.failed, self.skipped, self.wall_time_s
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tallies_and_serializes() {
        let mut r = RunReport::new("verify", BTreeMap::from([("level".into(), "quick".into())]));
        r.push(CheckResult::near("a", 1.0, 1.0 + 1e-12, 1e-9));
        r.push(CheckResult::below("b", 2.0, 1.0));
        assert_eq!((r.passed, r.failed), (1, 1));
        assert!(!r.all_passed());
        let json = r.to_json();
        assert!(json.contains("\"status\": \"fail\""));
        assert!(r.to_text().contains("FAIL b"));
    }
}
