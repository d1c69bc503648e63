// Copyright 2026 The shallowpocket Authors
// SPDX-License-Identifier: Apache-2.0

//! Plain-text reporting for the acceptance checks in `tests/`.

use std::fmt::Write;

/// Outcome of one acceptance criterion: scored checks plus unscored notes.
#[derive(Debug, Default)]
pub struct Criterion {
    pub checks: Vec<(bool, String)>,
    pub notes: Vec<String>,
}

impl Criterion {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn check(&mut self, ok: bool, detail: impl Into<String>) {
        self.checks.push((ok, detail.into()));
    }

    pub fn note(&mut self, detail: impl Into<String>) {
        self.notes.push(detail.into());
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|(ok, _)| *ok)
    }

    /// Headline `criterion N name: PASS|FAIL (secs)` and indented details.
    pub fn render(&self, number: usize, name: &str, seconds: f64) -> String {
        let mut out = format!(
            "criterion {number} {name}: {} ({seconds:.1}s)\n",
            verdict(self.passed())
        );
        for (ok, detail) in &self.checks {
            let _ = writeln!(out, "    {} {detail}", verdict(*ok));
        }
        for note in &self.notes {
            let _ = writeln!(out, "    note: {note}");
        }
        out
    }
}

pub fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}
