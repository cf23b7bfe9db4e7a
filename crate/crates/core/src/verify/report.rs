use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// Preconditions not met (early stop, too few rows).
    Inconclusive,
}

/// How a report turns its margin into a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// Pass iff margin ≥ -tolerance. A negative tolerance demands a strict
    /// margin of at least |tolerance|.
    AtLeast,
    /// Pass iff |margin| ≤ tolerance.
    Equal,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub id: String,
    /// First 16 hex digits of SHA-256 over the JSON of the check inputs.
    pub inputs_digest: String,
    pub lhs: f64,
    pub rhs: f64,
    /// lhs - rhs.
    pub margin: f64,
    /// margin / max(|lhs|, |rhs|, 1e-30).
    pub relative_margin: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

pub fn digest<T: Serialize + ?Sized>(inputs: &T) -> String {
    let bytes = serde_json::to_vec(inputs).unwrap_or_default();
    let hash = Sha256::digest(&bytes);
    hex::encode(&hash[..8])
}

impl CheckReport {
    fn new<T: Serialize + ?Sized>(
        id: impl Into<String>,
        inputs: &T,
        lhs: f64,
        rhs: f64,
        tolerance: f64,
        comparison: Comparison,
    ) -> Self {
        let margin = lhs - rhs;
        let scale = lhs.abs().max(rhs.abs()).max(1e-30);
        let ok = match comparison {
            Comparison::AtLeast => margin >= -tolerance,
            Comparison::Equal => margin.abs() <= tolerance,
        };
        Self {
            id: id.into(),
            inputs_digest: digest(inputs),
            lhs,
            rhs,
            margin,
            relative_margin: margin / scale,
            tolerance,
            comparison,
            verdict: if ok { Verdict::Pass } else { Verdict::Fail },
            notes: Vec::new(),
        }
    }

    /// lhs ≥ rhs up to `tolerance`.
    pub fn at_least<T: Serialize + ?Sized>(id: impl Into<String>, inputs: &T, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        Self::new(id, inputs, lhs, rhs, tolerance, Comparison::AtLeast)
    }

    /// lhs = rhs within `tolerance`.
    pub fn equal<T: Serialize + ?Sized>(id: impl Into<String>, inputs: &T, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        Self::new(id, inputs, lhs, rhs, tolerance, Comparison::Equal)
    }

    pub fn inconclusive<T: Serialize + ?Sized>(id: impl Into<String>, inputs: &T, note: impl Into<String>) -> Self {
        let mut r = Self::new(id, inputs, f64::NAN, f64::NAN, 0.0, Comparison::AtLeast);
        r.verdict = Verdict::Inconclusive;
        r.notes.push(note.into());
        r
    }

    pub fn note(mut self, s: impl Into<String>) -> Self {
        self.notes.push(s.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Fixed-width table, one line per report.
pub fn summary_table(reports: &[CheckReport]) -> String {
    let w = reports.iter().map(|r| r.id.len()).max().unwrap_or(2).max(5);
    let mut out = format!("{:<w$}  {:<12}  {:>12}  {:>12}  {:>10}\n", "check", "verdict", "margin", "rel", "tol");
    for r in reports {
        let v = match r.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        };
        let _ = writeln!(
            out,
            "{:<w$}  {:<12}  {:>12.4e}  {:>12.4e}  {:>10.2e}",
            r.id, v, r.margin, r.relative_margin, r.tolerance
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_rules() {
        assert!(CheckReport::at_least("a", &1, 1.0, 1.0 + 1e-9, 1e-8).passed());
        assert!(!CheckReport::at_least("a", &1, 1.0, 1.0 + 1e-9, 0.0).passed());
        // strict margin
        assert!(!CheckReport::at_least("a", &1, 1.0, 0.99, -0.1).passed());
        assert!(CheckReport::equal("a", &1, 1.0, 1.0 - 1e-9, 1e-8).passed());
        assert!(!CheckReport::equal("a", &1, 1.0, 1.1, 1e-8).passed());
        let r = CheckReport::inconclusive("a", &1, "early stop");
        assert_eq!(r.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn digest_is_stable() {
        assert_eq!(digest(&[1.0, 2.0]), digest(&vec![1.0, 2.0]));
        assert_ne!(digest(&[1.0, 2.0]), digest(&[2.0, 1.0]));
        assert_eq!(digest(&0).len(), 16);
    }
}
