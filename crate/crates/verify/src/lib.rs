//! Reporting for the acceptance suite: each criterion is timed against its
//! budget and printed as a single `PASS`/`FAIL` line.

use std::fmt;
use std::time::{Duration, Instant};

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub id: &'static str,
    pub title: &'static str,
    /// Outcome of the check itself, before the time budget is applied.
    pub check: Result<String, String>,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl Verdict {
    pub fn within_budget(&self) -> bool {
        self.elapsed <= self.budget
    }

    pub fn passed(&self) -> bool {
        self.check.is_ok() && self.within_budget()
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let detail = match &self.check {
            Ok(d) | Err(d) => d,
        };
        write!(
            f,
            "{} {} {}: {}; {:.2} s (limit {} s{})",
            self.id,
            if self.passed() { "PASS" } else { "FAIL" },
            self.title,
            detail,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs(),
            if self.within_budget() { "" } else { ", exceeded" }
        )
    }
}

/// Runs `check` once and times it.
pub fn evaluate(
    id: &'static str,
    title: &'static str,
    budget: Duration,
    check: impl FnOnce() -> Result<String, String>,
) -> Verdict {
    let start = Instant::now();
    let check = check();
    Verdict {
        id,
        title,
        check,
        elapsed: start.elapsed(),
        budget,
    }
}
