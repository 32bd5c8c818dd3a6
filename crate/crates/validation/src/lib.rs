//! Runner for named acceptance criteria with wall-clock budgets.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

/// Outcome of one criterion.
#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub id: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl Verdict {
    pub fn line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        format!("{} {status} [{:.2} s] {}", self.id, self.elapsed.as_secs_f64(), self.detail)
    }
}

/// Collects findings for one criterion; any failed check fails it.
#[derive(Debug, Default)]
pub struct Checks {
    failures: Vec<String>,
    notes: String,
}

impl Checks {
    pub fn check(&mut self, ok: bool, what: impl Into<String>) {
        let what = what.into();
        if !ok {
            self.failures.push(what.clone());
        }
        if !self.notes.is_empty() {
            self.notes.push_str("; ");
        }
        let _ = write!(self.notes, "{}{what}", if ok { "" } else { "NOT " });
    }

    pub fn note(&mut self, what: impl AsRef<str>) {
        if !self.notes.is_empty() {
            self.notes.push_str("; ");
        }
        self.notes.push_str(what.as_ref());
    }

    pub fn failed(&self) -> bool {
        !self.failures.is_empty()
    }
}

/// Run `body`, time it against `budget`, and print one line.
pub fn run<E: std::fmt::Display>(
    id: &'static str,
    budget: Option<Duration>,
    body: impl FnOnce(&mut Checks) -> Result<(), E>,
) -> Verdict {
    let mut checks = Checks::default();
    let start = Instant::now();
    let result = body(&mut checks);
    let elapsed = start.elapsed();
    if let Err(e) = result {
        checks.check(false, format!("error: {e}"));
    }
    if let Some(b) = budget {
        checks.check(elapsed <= b, format!("runtime {:.1} s within {:.0} s", elapsed.as_secs_f64(), b.as_secs_f64()));
    }
    let verdict = Verdict { id, passed: !checks.failed(), detail: checks.notes, elapsed };
    println!("{}", verdict.line());
    verdict
}
