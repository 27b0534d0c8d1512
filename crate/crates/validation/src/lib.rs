// SPDX-License-Identifier: MIT OR Apache-2.0

//! Pass/fail bookkeeping for the acceptance run in `tests/acceptance.rs`.

use std::time::{Duration, Instant};

/// Outcome of one acceptance criterion.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl Outcome {
    pub fn line(&self) -> String {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        format!("{verdict} {} ({:.1}s): {}", self.name, self.elapsed.as_secs_f64(), self.detail)
    }
}

/// Runs criteria in order and prints one line per criterion as it finishes.
#[derive(Debug, Default)]
pub struct Report {
    outcomes: Vec<Outcome>,
}

impl Report {
    pub fn run(&mut self, name: &'static str, check: impl FnOnce() -> (bool, String)) {
        let start = Instant::now();
        let (pass, detail) = check();
        let outcome = Outcome { name, pass, detail, elapsed: start.elapsed() };
        println!("{}", outcome.line());
        self.outcomes.push(outcome);
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn failures(&self) -> usize {
        self.outcomes.iter().filter(|o| !o.pass).count()
    }
}
