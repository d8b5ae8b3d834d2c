//! Per-theorem outcome tables (CSV) and the aggregate summary block.

use ipl_core::harness::{Metrics, SearchOutcome};
use std::fmt::Write as _;

pub const CSV_HEADER: &str = "id,success,n_lean,steps,failure_reason";

pub fn outcome_row(id: &str, outcome: &SearchOutcome) -> String {
    let reason = outcome
        .failure_reason
        .map(|r| r.to_string())
        .unwrap_or_else(|| "none".to_string());
    format!(
        "{id},{},{},{},{reason}",
        outcome.success, outcome.n_lean, outcome.steps
    )
}

pub fn outcomes_csv(rows: &[(String, SearchOutcome)]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for (id, outcome) in rows {
        out.push_str(&outcome_row(id, outcome));
        out.push('\n');
    }
    out
}

pub fn summary_text(metrics: &Metrics) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "theorems: {}  succeeded: {}  success-rate: {:.4}  total-n-lean: {}",
        metrics.total, metrics.successes, metrics.success_rate, metrics.total_n_lean
    );
    for (reason, count) in &metrics.failure_histogram {
        let _ = writeln!(out, "failures[{reason}]: {count}");
    }
    out
}
