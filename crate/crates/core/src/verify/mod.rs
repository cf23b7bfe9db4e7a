//! Verification suites. Every check yields a [`CheckReport`] with the two
//! sides of the relation, the margin, the tolerance and a verdict.

pub mod checks;
mod report;
mod suites;

pub use report::{digest, summary_table, CheckReport, Comparison, Verdict};
pub use suites::{
    convex_fixtures, evaluate_surface, growth_run, limit_run, regularization_run, run_suite, variational_run,
    variational_scenarios, Evaluated, Fixture, Suite, VerifyConfig,
};

/// JSON array of reports.
pub fn reports_json(reports: &[CheckReport]) -> serde_json::Value {
    serde_json::json!({
        "schema_version": crate::io::SCHEMA_VERSION,
        "reports": reports,
    })
}
