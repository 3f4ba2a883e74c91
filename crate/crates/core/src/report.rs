//! Report types returned by validators and law checkers.
//!
//! A `ValidationReport` lists structural violations; an empty report means
//! the object is valid. A `Report` is the outcome of a named suite of
//! checks with an overall verdict. Both render to stable text: checks are
//! recorded in a fixed order and witnesses are canonical identifiers.

use serde::Serialize;

/// One broken structural law, with enough context to locate it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    /// Which law failed, e.g. `d0 d2 = d1 d0` or `segal surjective`.
    pub law: String,
    /// Where it failed: a cell id plus the level or multi-index.
    pub witness: String,
}

/// Outcome of a structural validator. Empty means valid.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, law: impl Into<String>, witness: impl Into<String>) {
        self.violations.push(Violation {
            law: law.into(),
            witness: witness.into(),
        });
    }

    pub fn merge_under(&mut self, prefix: &str, other: ValidationReport) {
        for v in other.violations {
            self.violations.push(Violation {
                law: format!("{prefix}: {}", v.law),
                witness: v.witness,
            });
        }
    }

    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn render(&self) -> String {
        if self.is_valid() {
            return "valid\n".to_string();
        }
        let mut out = String::new();
        for v in &self.violations {
            out.push_str(&format!("violation: {} at {}\n", v.law, v.witness));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    Pass,
    Fail,
}

/// One named check inside a `Report`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    /// Canonical witness for a failure, or extra detail for a pass.
    pub detail: Option<String>,
}

/// Outcome of a law suite: a list of checks plus what was deliberately
/// left unchecked. The verdict is PASS exactly when every check passed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub title: String,
    pub checks: Vec<Check>,
    pub not_checked: Vec<String>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Report {
            title: title.into(),
            checks: Vec::new(),
            not_checked: Vec::new(),
        }
    }

    pub fn pass(&mut self, name: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            status: Status::Pass,
            detail: None,
        });
    }

    pub fn pass_with(&mut self, name: impl Into<String>, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            status: Status::Pass,
            detail: Some(detail.into()),
        });
    }

    pub fn fail(&mut self, name: impl Into<String>, witness: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            status: Status::Fail,
            detail: Some(witness.into()),
        });
    }

    pub fn record(&mut self, name: impl Into<String>, ok: bool, witness: impl Into<String>) {
        if ok {
            self.pass(name);
        } else {
            self.fail(name, witness);
        }
    }

    pub fn skip(&mut self, name: impl Into<String>) {
        self.not_checked.push(name.into());
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status == Status::Pass)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| c.status == Status::Fail)
    }

    pub fn render(&self, with_detail: bool) -> String {
        let mut out = format!(
            "{}: {}\n",
            self.title,
            if self.passed() { "PASS" } else { "FAIL" }
        );
        for c in &self.checks {
            let mark = match c.status {
                Status::Pass => "ok",
                Status::Fail => "FAIL",
            };
            out.push_str(&format!("  [{mark}] {}", c.name));
            if let Some(d) = &c.detail {
                if with_detail || c.status == Status::Fail {
                    out.push_str(&format!(" ({d})"));
                }
            }
            out.push('\n');
        }
        for n in &self.not_checked {
            out.push_str(&format!("  [not checked] {n}\n"));
        }
        out
    }
}
