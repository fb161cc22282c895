//! Certificates: named, timed checks with a mandatory witness on failure.
//!
//! Builders push one certificate per verified invariant into a log. A failed
//! check aborts the build by default (the caller gets the log with the
//! failure recorded); negative controls use the soft variant, which records
//! the outcome without aborting.
//!
//! Timing is kept on the certificate for interactive display but is never
//! serialized: exported reports must be byte-identical across runs.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::time::Instant;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Pass,
    Fail,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Pass => write!(f, "pass"),
            Status::Fail => write!(f, "FAIL"),
        }
    }
}

/// One verified claim. `claim` states what was checked, in neutral language;
/// `witness` explains a failure and is always present on Fail.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Certificate {
    pub name: String,
    pub claim: String,
    pub status: Status,
    pub witness: Option<String>,
    #[serde(skip)]
    pub millis: u128,
}

#[derive(Debug, Error)]
#[error("certificate {0} failed")]
pub struct CertError(pub String);

/// An append-only list of certificates for one build or verification run.
#[derive(Default)]
pub struct CertLog {
    certs: Vec<Certificate>,
}

impl CertLog {
    pub fn new() -> CertLog {
        CertLog::default()
    }

    /// Runs a check, records it, and aborts (Err) on failure.
    pub fn check(
        &mut self,
        name: &str,
        claim: &str,
        body: impl FnOnce() -> Result<(), String>,
    ) -> Result<(), CertError> {
        if self.record(name, claim, body) {
            Ok(())
        } else {
            Err(CertError(name.to_string()))
        }
    }

    /// Runs a check and records it without aborting; returns pass/fail.
    /// Meant for negative controls and best-effort stages.
    pub fn check_soft(
        &mut self,
        name: &str,
        claim: &str,
        body: impl FnOnce() -> Result<(), String>,
    ) -> bool {
        self.record(name, claim, body)
    }

    fn record(
        &mut self,
        name: &str,
        claim: &str,
        body: impl FnOnce() -> Result<(), String>,
    ) -> bool {
        let start = Instant::now();
        let outcome = body();
        let millis = start.elapsed().as_millis();
        let (status, witness) = match outcome {
            Ok(()) => (Status::Pass, None),
            Err(w) => (Status::Fail, Some(w)),
        };
        self.certs.push(Certificate {
            name: name.to_string(),
            claim: claim.to_string(),
            status,
            witness,
            millis,
        });
        status == Status::Pass
    }

    pub fn certificates(&self) -> &[Certificate] {
        &self.certs
    }

    pub fn into_certificates(self) -> Vec<Certificate> {
        self.certs
    }

    pub fn extend(&mut self, certs: Vec<Certificate>) {
        self.certs.extend(certs);
    }

    pub fn all_passed(&self) -> bool {
        self.certs.iter().all(|c| c.status == Status::Pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Certificate> {
        self.certs.iter().filter(|c| c.status == Status::Fail)
    }
}

/// Renders certificates as a deterministic plain-text report, one block per
/// certificate in log order. No timing, no absolute paths.
pub fn render_report(certs: &[Certificate]) -> String {
    let mut out = String::new();
    out.push_str("report-version: 1\n");
    out.push_str(&format!("certificates: {}\n", certs.len()));
    let passed = certs.iter().filter(|c| c.status == Status::Pass).count();
    out.push_str(&format!("passed: {passed}\n"));
    out.push_str(&format!("failed: {}\n", certs.len() - passed));
    for c in certs {
        out.push('\n');
        out.push_str(&format!("certificate: {}\n", c.name));
        out.push_str(&format!("  claim: {}\n", c.claim));
        out.push_str(&format!("  status: {}\n", c.status));
        if let Some(w) = &c.witness {
            for line in w.lines() {
                out.push_str(&format!("  witness: {line}\n"));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failed_checks_abort_and_keep_a_witness() {
        let mut log = CertLog::new();
        log.check("ok", "trivial", || Ok(())).unwrap();
        let err = log.check("bad", "always fails", || Err("broken here".into()));
        assert!(err.is_err());
        assert!(!log.all_passed());
        let fail = log.failures().next().unwrap();
        assert_eq!(fail.name, "bad");
        assert_eq!(fail.witness.as_deref(), Some("broken here"));
    }

    #[test]
    fn soft_checks_do_not_abort() {
        let mut log = CertLog::new();
        assert!(!log.check_soft("soft", "fails quietly", || Err("no".into())));
        assert_eq!(log.certificates().len(), 1);
    }

    #[test]
    fn report_is_deterministic_and_timing_free() {
        let mut log = CertLog::new();
        log.check("a", "first", || Ok(())).unwrap();
        log.check_soft("b", "second", || Err("w1\nw2".into()));
        let r1 = render_report(log.certificates());
        let r2 = render_report(log.certificates());
        assert_eq!(r1, r2);
        assert!(!r1.contains("ms"));
        assert!(r1.contains("witness: w1"));
        assert!(r1.contains("witness: w2"));
    }
}
