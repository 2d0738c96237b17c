//! Verification reports: named residual checks with a pass/fail verdict each.

use serde::{Deserialize, Serialize};

use crate::matkernel::{CMatrix, Tolerance};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub residual: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

/// One instance of an equation: residual, operand scale and location.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub residual: f64,
    pub scale: f64,
    pub witness: String,
}

impl Instance {
    pub fn compare(lhs: &CMatrix, rhs: &CMatrix, witness: impl Into<String>) -> Self {
        let t = Tolerance::default();
        let (residual, scale) = if lhs.shape() == rhs.shape() {
            (t.residual(lhs, rhs), t.scale(lhs, rhs))
        } else {
            (f64::INFINITY, 1.0)
        };
        Instance {
            residual,
            scale,
            witness: witness.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub tol: f64,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(command: impl Into<String>, tol: Tolerance) -> Self {
        Report {
            command: command.into(),
            tol: tol.eps(),
            checks: Vec::new(),
        }
    }

    fn tolerance(&self) -> Tolerance {
        Tolerance::new(self.tol).unwrap_or_default()
    }

    pub fn push(&mut self, name: impl Into<String>, status: Status, residual: f64, witness: Option<String>) {
        self.checks.push(Check {
            name: name.into(),
            status,
            residual,
            witness,
        });
    }

    /// Record `‖lhs - rhs‖_F`, passing under the report's tolerance rule.
    pub fn compare(&mut self, name: impl Into<String>, witness: Option<String>, lhs: &CMatrix, rhs: &CMatrix) -> bool {
        let tol = self.tolerance();
        if lhs.shape() != rhs.shape() {
            self.push(name, Status::Fail, f64::INFINITY, witness);
            return false;
        }
        let residual = tol.residual(lhs, rhs);
        let ok = tol.accepts(residual, tol.scale(lhs, rhs));
        self.push(name, if ok { Status::Pass } else { Status::Fail }, residual, witness);
        ok
    }

    /// Record the residual of an equation between lazily evaluated diagrams.
    pub fn equate(
        &mut self,
        name: impl Into<String>,
        witness: Option<String>,
        lhs: &crate::diagram::Diagram<'_>,
        rhs: &crate::diagram::Diagram<'_>,
    ) -> bool {
        let (residual, scale) = crate::diagram::compare(lhs, rhs);
        self.residual(name, witness, residual, scale)
    }

    /// Record a precomputed residual against the given operand scale.
    pub fn residual(&mut self, name: impl Into<String>, witness: Option<String>, residual: f64, scale: f64) -> bool {
        let ok = self.tolerance().accepts(residual, scale);
        self.push(name, if ok { Status::Pass } else { Status::Fail }, residual, witness);
        ok
    }

    pub fn flag(&mut self, name: impl Into<String>, witness: Option<String>, ok: bool) -> bool {
        self.push(name, if ok { Status::Pass } else { Status::Fail }, 0.0, witness);
        ok
    }

    /// Record one check summarising many instances: it fails if any instance
    /// fails, reports the largest residual, and names the first failing
    /// instance (or the worst one when all pass). No instances means skipped.
    pub fn aggregate(&mut self, name: impl Into<String>, items: impl IntoIterator<Item = Instance>) -> bool {
        let tol = self.tolerance();
        let mut worst: Option<Instance> = None;
        let mut first_fail: Option<Instance> = None;
        for it in items {
            if first_fail.is_none() && !tol.accepts(it.residual, it.scale) {
                first_fail = Some(it.clone());
            }
            if worst.as_ref().is_none_or(|w| it.residual > w.residual) {
                worst = Some(it);
            }
        }
        match (worst, first_fail) {
            (None, _) => {
                self.push(name, Status::Skipped, 0.0, None);
                true
            }
            (Some(w), Some(f)) => {
                self.push(name, Status::Fail, w.residual.max(f.residual), Some(f.witness));
                false
            }
            (Some(w), None) => {
                self.push(name, Status::Pass, w.residual, Some(w.witness));
                true
            }
        }
    }

    /// Append the checks of another report with a name prefix.
    pub fn absorb(&mut self, prefix: &str, other: Report) {
        for mut c in other.checks {
            c.name = format!("{prefix}.{}", c.name);
            self.checks.push(c);
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    /// Overall verdict: any failure dominates, then any inconclusive check.
    pub fn status(&self) -> Status {
        if self.checks.iter().any(|c| c.status == Status::Fail) {
            Status::Fail
        } else if self.checks.iter().any(|c| c.status == Status::Inconclusive) {
            Status::Inconclusive
        } else {
            Status::Pass
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.failures().next()
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn max_residual(&self) -> f64 {
        self.checks
            .iter()
            .filter(|c| c.status != Status::Skipped)
            .map(|c| c.residual)
            .fold(0.0, f64::max)
    }

    pub fn count(&self, status: Status) -> usize {
        self.checks.iter().filter(|c| c.status == status).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdicts() {
        let mut r = Report::new("t", Tolerance::default());
        r.residual("a", None, 0.0, 1.0);
        assert_eq!(r.status(), Status::Pass);
        r.push("b", Status::Inconclusive, 0.0, None);
        assert_eq!(r.status(), Status::Inconclusive);
        assert!(r.passed());
        r.residual("c", Some("x".into()), 1.0, 1.0);
        assert_eq!(r.status(), Status::Fail);
        assert_eq!(r.first_failure().unwrap().witness.as_deref(), Some("x"));
    }

    #[test]
    fn skipped_residuals_are_ignored_in_max() {
        let mut r = Report::new("t", Tolerance::default());
        r.push("s", Status::Skipped, 5.0, None);
        r.residual("a", None, 1e-12, 1.0);
        assert_eq!(r.max_residual(), 1e-12);
    }
}
