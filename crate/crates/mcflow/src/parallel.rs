//! Relation checking spread over a rayon pool.

use mcflow_core::linf::{RelationOptions, RelationReport, RelationViolation};
use mcflow_core::{LInfStructure, PartialDomain};
use rayon::prelude::*;
use rayon::ThreadPool;

use crate::workspace::CliError;

pub const THREADS_VAR: &str = "MC_DEFORM_THREADS";

/// A pool capped by `MC_DEFORM_THREADS` when it is set.
pub fn pool() -> Result<ThreadPool, CliError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_VAR) {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::input(format!("{THREADS_VAR} must be a positive integer, got \"{v}\"")))?;
        b = b.num_threads(n);
    }
    b.build().map_err(|e| CliError::input(format!("cannot start worker threads: {e}")))
}

/// Same result as the sequential checker. Tuples are generated in a fixed
/// order and the indexed collect keeps it.
pub fn check_relations(
    pool: &ThreadPool,
    l: &LInfStructure,
    domain: &PartialDomain,
    up_to_d: usize,
    opts: &RelationOptions,
) -> Result<RelationReport, CliError> {
    let mut report = RelationReport { up_to_d, tuples_checked: 0, exhaustive: true, violations: Vec::new() };
    for d in 1..=up_to_d {
        let (tuples, exhaustive) = l.relation_tuples(domain, d, opts);
        report.exhaustive &= exhaustive;
        report.tuples_checked += tuples.len();
        let residuals: Vec<_> =
            pool.install(|| tuples.par_iter().map(|t| l.relation_residual(t)).collect::<Result<Vec<_>, _>>())?;
        for (t, r) in tuples.into_iter().zip(residuals) {
            if !r.is_zero() {
                report.violations.push(RelationViolation { inputs: t, residual: r });
            }
        }
    }
    Ok(report)
}
