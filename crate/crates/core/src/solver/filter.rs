use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dense::{norm2, DenseMatrix};
use crate::error::{Error, Result};
use crate::factorization::InnerFilterOperator;
use crate::msgmres::{combine_solutions, ShiftedSolveResult};
use crate::par;
use crate::rational::CompositeCoeffs;

/// Work done so far by a filter.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperationCounts {
    pub factorizations: usize,
    /// Triangular solve pairs.
    pub solves: usize,
    /// Block applications of the inner operator.
    pub g_blocks: usize,
    /// Columns the inner operator was applied to.
    pub g_columns: usize,
    pub gmres_iterations: usize,
}

impl OperationCounts {
    pub(crate) fn of(op: &InnerFilterOperator, gmres_iterations: usize) -> Self {
        Self {
            factorizations: op.n_poles(),
            solves: op.solve_count(),
            g_blocks: op.apply_count(),
            g_columns: op.column_count(),
            gmres_iterations,
        }
    }
}

pub struct FilterOutput {
    pub u: DenseMatrix,
    /// GMRES iterations per column; empty for filters without an outer solve.
    pub gmres_iterations: Vec<usize>,
}

/// `Y ↦ ρ(B⁻¹A) Y` for some filter `ρ`.
pub trait SubspaceFilter {
    fn apply(&mut self, y: &DenseMatrix) -> Result<FilterOutput>;

    /// Outer order reported in the trace.
    fn k2(&self) -> usize {
        1
    }

    fn counts(&self) -> OperationCounts;
}

/// Direct application of `Σ w_i (p_i B − A)⁻¹ B`.
pub struct SimpleFilter {
    pub op: InnerFilterOperator,
}

impl SubspaceFilter for SimpleFilter {
    fn apply(&mut self, y: &DenseMatrix) -> Result<FilterOutput> {
        Ok(FilterOutput {
            u: self.op.apply_block(y)?,
            gmres_iterations: Vec::new(),
        })
    }

    fn counts(&self) -> OperationCounts {
        OperationCounts::of(&self.op, 0)
    }
}

/// `R_{k2}(T(G))` applied through multi-shift GMRES on `G`.
pub struct CompositeFilter {
    pub op: InnerFilterOperator,
    pub coeffs: CompositeCoeffs,
    pub gmres_tol: f64,
    pub gmres_max_iter: usize,
    /// Unconverged shifts above this relative residual abort the solve.
    pub stall_tol: f64,
    gmres_total: usize,
}

impl CompositeFilter {
    pub fn new(op: InnerFilterOperator, coeffs: CompositeCoeffs, gmres_tol: f64, gmres_max_iter: usize, stall_tol: f64) -> Self {
        Self {
            op,
            coeffs,
            gmres_tol,
            gmres_max_iter,
            stall_tol,
            gmres_total: 0,
        }
    }
}

/// Rejects results with an unconverged shift whose residual exceeds
/// `stall_tol`; smaller residuals are accepted as the best available.
pub(crate) fn check_stall(res: &ShiftedSolveResult, stall_tol: f64) -> Result<()> {
    for i in 0..res.shifts.len() {
        let rel = res.residual_norms[i] / res.rhs_norm;
        if !res.converged[i] && !(rel <= stall_tol) {
            return Err(Error::GmresStalled {
                shift: res.shifts[i],
                residual: rel,
                iterations: res.iterations[i],
            });
        }
    }
    Ok(())
}

impl SubspaceFilter for CompositeFilter {
    fn apply(&mut self, y: &DenseMatrix) -> Result<FilterOutput> {
        let gy = self.op.apply_block(y)?;
        let this = &*self;
        let cols = par::map_indexed(gy.n_cols(), |j| -> Result<(Vec<Complex64>, usize)> {
            let b = gy.col(j);
            if norm2(b) == 0.0 {
                return Ok((b.to_vec(), 0));
            }
            let (res, ws) =
                crate::msgmres::solve_all_shifts(&this.op, b, &this.coeffs.shifts, this.gmres_tol, this.gmres_max_iter)?;
            check_stall(&res, this.stall_tol)?;
            Ok((combine_solutions(&res, &this.coeffs, b)?, ws.op_applications()))
        });
        let mut u = Vec::with_capacity(cols.len());
        let mut iters = Vec::with_capacity(cols.len());
        for c in cols {
            let (col, it) = c?;
            u.push(col);
            iters.push(it);
        }
        self.gmres_total += iters.iter().sum::<usize>();
        Ok(FilterOutput {
            u: DenseMatrix::from_columns(y.n_rows(), &u)?,
            gmres_iterations: iters,
        })
    }

    fn k2(&self) -> usize {
        self.coeffs.k2
    }

    fn counts(&self) -> OperationCounts {
        OperationCounts::of(&self.op, self.gmres_total)
    }
}

/// Multiplication by a fixed dense matrix, e.g. an exact spectral projector.
pub struct DenseFilter(pub DenseMatrix);

impl SubspaceFilter for DenseFilter {
    fn apply(&mut self, y: &DenseMatrix) -> Result<FilterOutput> {
        Ok(FilterOutput {
            u: self.0.matmul(y)?,
            gmres_iterations: Vec::new(),
        })
    }

    fn counts(&self) -> OperationCounts {
        OperationCounts::default()
    }
}
