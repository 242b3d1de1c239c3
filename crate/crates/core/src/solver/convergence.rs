use num_complex::Complex64;

use super::trace::IterationTrace;
use crate::pencil::DiskRegion;

/// Indices of Ritz pairs inside `region` with residual below `ghost_tol`.
pub fn ghost_filter(eigenvalues: &[Complex64], residuals: &[f64], region: &DiskRegion, ghost_tol: f64) -> Vec<usize> {
    eigenvalues
        .iter()
        .zip(residuals)
        .enumerate()
        .filter(|(_, (&l, &r))| region.contains(l) && r < ghost_tol)
        .map(|(i, _)| i)
        .collect()
}

/// True when the filtered count `p` is positive and unchanged over the last
/// `window` records and every filtered residual of the last record is at
/// most `tol`.
pub fn check_convergence(trace: &IterationTrace, tol: f64, window: usize) -> bool {
    let n = trace.records.len();
    if n < window.max(1) {
        return false;
    }
    let last = &trace.records[n - 1];
    let stable = trace.records[n - window.max(1)..].iter().all(|r| r.p == last.p);
    stable && last.p > 0 && last.max_residual.is_some_and(|m| m <= tol)
}
