use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

/// Failures kept per suite; the count is always exact.
pub const MAX_RECORDED_FAILURES: usize = 25;

#[derive(Clone, Debug, Serialize)]
pub struct Failure {
    pub case: String,
    pub detail: String,
    /// The offending objects, enough to replay the case.
    pub counterexample: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub anchor: String,
    pub status: Status,
    pub cases: u64,
    pub failure_count: u64,
    pub failures: Vec<Failure>,
    pub notes: Vec<String>,
    pub data: Value,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

impl SuiteReport {
    pub fn new(suite: &str, anchor: &str) -> Self {
        SuiteReport {
            suite: suite.into(),
            anchor: anchor.into(),
            status: Status::Pass,
            cases: 0,
            failure_count: 0,
            failures: Vec::new(),
            notes: Vec::new(),
            data: Value::Null,
        }
    }

    /// Records one case; the closures run only on failure.
    pub fn check<N, P>(&mut self, ok: bool, case: N, counterexample: P)
    where
        N: FnOnce() -> String,
        P: FnOnce() -> Value,
    {
        self.cases += 1;
        if !ok {
            self.fail(case(), String::new(), counterexample());
        }
    }

    pub fn fail(&mut self, case: String, detail: String, counterexample: Value) {
        self.failure_count += 1;
        self.status = Status::Fail;
        if self.failures.len() < MAX_RECORDED_FAILURES {
            self.failures.push(Failure { case, detail, counterexample });
        }
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: Value,
    pub status: Status,
    pub suites: Vec<SuiteReport>,
    /// Milliseconds per suite. Kept apart so the rest of the report is
    /// byte-identical across runs.
    pub timings: BTreeMap<String, u64>,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.suites {
            let tag = if r.passed() { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "[{tag}] {} ({})", r.suite, r.anchor);
            let _ = writeln!(out, "       cases {}  failures {}", r.cases, r.failure_count);
            for n in &r.notes {
                let _ = writeln!(out, "       note: {n}");
            }
            for f in &r.failures {
                let _ = writeln!(out, "       failed: {}", f.case);
                if !f.detail.is_empty() {
                    let _ = writeln!(out, "         {}", f.detail);
                }
                let _ = writeln!(out, "         {}", f.counterexample);
            }
        }
        let verdict = if self.passed() { "all suites passed" } else { "some suites failed" };
        let _ = writeln!(out, "{verdict}");
        let _ = writeln!(out, "\ntimings (ms)");
        for (k, v) in &self.timings {
            let _ = writeln!(out, "  {k:<18} {v}");
        }
        out
    }

    /// One row per suite, no timings.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["suite", "anchor", "status", "cases", "failures", "notes"]).expect("in-memory write");
        for r in &self.suites {
            let status = if r.passed() { "pass" } else { "fail" };
            w.write_record([
                r.suite.as_str(),
                r.anchor.as_str(),
                status,
                &r.cases.to_string(),
                &r.failure_count.to_string(),
                &r.notes.join("; "),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}
