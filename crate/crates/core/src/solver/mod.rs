//! Subspace iteration with a rational filter, the fixed composite solver,
//! and the adaptive composite solver that doubles `k2` instead of iterating.

mod config;
mod convergence;
mod filter;
mod report;
mod trace;

pub use config::{Mode, SolverConfig, SIGMA_OFFSET};
pub use convergence::{check_convergence, ghost_filter};
pub use filter::{CompositeFilter, DenseFilter, FilterOutput, OperationCounts, SimpleFilter, SubspaceFilter};
pub use report::{EigenReport, ReportJson, TraceJson, REPORT_SCHEMA};
pub use trace::{parse_trace_csv, CsvRow, IterationRecord, IterationTrace, CSV_HEADER};

use num_complex::Complex64;

use crate::dense::DenseMatrix;
use crate::dense_eig::{orth, reduced_solve, thin_q, RANK_TOL};
use crate::error::{Error, Result};
use crate::factorization::{build_inner_operator, InnerFilterOperator};
use crate::msgmres::{combine_solutions, KrylovWorkspace};
use crate::par;
use crate::pencil::{left_relative_residual, relative_residual, MatrixPencil};
use crate::rational::{composite_coeffs, gauss_rule, trapezoid_rule, PolesWeights, QuadratureRule};
use crate::rng::{complex_normal, seeded_stream};

/// Rayleigh–Ritz data of one outer step.
struct Projection {
    /// NaN for infinite Ritz values.
    ritz: Vec<Complex64>,
    right: DenseMatrix,
    left: DenseMatrix,
    /// Infinite where the residual is undefined.
    residuals: Vec<f64>,
    kept: Vec<usize>,
}

/// Stream of the starting block, apart from the generators' stream 0.
const START_STREAM: u64 = 1;

fn random_start(dim: usize, n_col: usize, seed: u64) -> Result<DenseMatrix> {
    let mut rng = seeded_stream(seed, START_STREAM);
    let y = DenseMatrix::from_fn(dim, n_col, |_, _| complex_normal(&mut rng));
    orth(&y, RANK_TOL)
}

fn project(pencil: &MatrixPencil, cfg: &SolverConfig, u: &DenseMatrix) -> Result<Projection> {
    let v = orth(u, RANK_TOL).map_err(|e| match e {
        Error::ZeroInput => Error::InsufficientSubspace {
            rank: 0,
            required: cfg.s_estimate,
        },
        e => e,
    })?;
    if v.n_cols() < cfg.s_estimate {
        return Err(Error::InsufficientSubspace {
            rank: v.n_cols(),
            required: cfg.s_estimate,
        });
    }
    let av = pencil.a().spmm(&v)?;
    let bv = pencil.b().spmm(&v)?;
    let w = thin_q(&av.combine(Complex64::new(1.0, 0.0), &bv, -cfg.sigma())?)?;
    let eig = reduced_solve(&w.adjoint_mul(&av)?, &w.adjoint_mul(&bv)?)?;
    let right = v.matmul(&eig.right)?;
    let left = w.matmul(&eig.left)?;
    let nan = Complex64::new(f64::NAN, f64::NAN);
    let ritz: Vec<Complex64> = eig.eigenvalues.iter().map(|e| e.unwrap_or(nan)).collect();
    let residuals = ritz
        .iter()
        .enumerate()
        .map(|(i, &l)| {
            if l.is_nan() {
                return Ok(f64::INFINITY);
            }
            match relative_residual(pencil, &cfg.region, l, right.col(i)) {
                Ok(r) => Ok(r),
                Err(Error::DefectiveDirection) => Ok(f64::INFINITY),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let kept = ghost_filter(&ritz, &residuals, &cfg.region, cfg.ghost_tol);
    Ok(Projection {
        ritz,
        right,
        left,
        residuals,
        kept,
    })
}

fn record(t: usize, k2: usize, proj: &Projection, gmres_iterations: Vec<usize>, counts: OperationCounts) -> IterationRecord {
    let max_residual = proj.kept.iter().map(|&i| proj.residuals[i]).reduce(f64::max);
    IterationRecord {
        t,
        k2,
        residuals: proj.residuals.iter().map(|&r| r.is_finite().then_some(r)).collect(),
        p: proj.kept.len(),
        max_residual,
        gmres_total: gmres_iterations.iter().sum(),
        gmres_iterations,
        g_applications: counts.g_columns,
        solves: counts.solves,
    }
}

struct RunState {
    trace: IterationTrace,
    converged: bool,
    final_k2: usize,
    counts: OperationCounts,
}

fn build_report(pencil: &MatrixPencil, cfg: &SolverConfig, proj: Projection, run: RunState) -> Result<EigenReport> {
    let mut idx = proj.kept.clone();
    idx.sort_by(|&a, &b| {
        let (x, y) = (proj.ritz[a], proj.ritz[b]);
        x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im))
    });
    let eigenvalues: Vec<Complex64> = idx.iter().map(|&i| proj.ritz[i]).collect();
    let left_vectors = proj.left.select_columns(&idx);
    let left_residuals = eigenvalues
        .iter()
        .enumerate()
        .map(|(j, &l)| match left_relative_residual(pencil, &cfg.region, l, left_vectors.col(j)) {
            Ok(r) => Ok(r),
            Err(Error::DefectiveDirection) => Ok(f64::INFINITY),
            Err(e) => Err(e),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EigenReport {
        mode: cfg.mode,
        region: cfg.region,
        residuals: idx.iter().map(|&i| proj.residuals[i]).collect(),
        right_vectors: proj.right.select_columns(&idx),
        left_vectors,
        eigenvalues,
        left_residuals,
        converged: run.converged,
        iterations: run.trace.len(),
        final_k2: run.final_k2,
        counts: run.counts,
        trace: run.trace,
    })
}

/// Subspace iteration: `U = filter(Y)`, `V = orth(U)`,
/// `W = orth(AV − σBV)`, QZ of `(WᴴAV, WᴴBV)`, `Y = V P_R V_R`, until the
/// filtered count is stable and all filtered residuals reach `cfg.tol`.
pub fn subspace_iterate(filter: &mut dyn SubspaceFilter, pencil: &MatrixPencil, cfg: &SolverConfig) -> Result<EigenReport> {
    cfg.validate(pencil.dim())?;
    let mut y = random_start(pencil.dim(), cfg.n_col(), cfg.seed)?;
    let mut trace = IterationTrace::default();
    let mut converged = false;
    let mut last = None;
    for t in 1..=cfg.max_outer {
        let out = filter.apply(&y)?;
        let proj = project(pencil, cfg, &out.u)?;
        trace.push(record(t, filter.k2(), &proj, out.gmres_iterations, filter.counts()));
        y = proj.right.clone();
        last = Some(proj);
        if check_convergence(&trace, cfg.tol, 2) {
            converged = true;
            break;
        }
    }
    let run = RunState {
        trace,
        converged,
        final_k2: filter.k2(),
        counts: filter.counts(),
    };
    build_report(pencil, cfg, last.expect("at least one outer iteration"), run)
}

fn inner_rule(cfg: &SolverConfig) -> Result<PolesWeights> {
    match cfg.rule {
        QuadratureRule::Trapezoid => trapezoid_rule(&cfg.region, cfg.k1),
        QuadratureRule::GaussSemicircle => gauss_rule(&cfg.region, cfg.k1),
    }
}

fn inner_operator(pencil: &MatrixPencil, cfg: &SolverConfig) -> Result<InnerFilterOperator> {
    cfg.validate(pencil.dim())?;
    build_inner_operator(pencil, &inner_rule(cfg)?)
}

/// Subspace iteration with the `k1`-pole rule of `cfg.rule`.
pub fn solve_simple(pencil: &MatrixPencil, cfg: &SolverConfig) -> Result<EigenReport> {
    par::with_threads(cfg.threads, || {
        let mut f = SimpleFilter {
            op: inner_operator(pencil, cfg)?,
        };
        let mut r = subspace_iterate(&mut f, pencil, cfg)?;
        r.mode = Mode::Simple;
        Ok(r)
    })
}

/// Subspace iteration with the composite filter of fixed order `k1·k2`.
pub fn solve_fixed_composite(pencil: &MatrixPencil, cfg: &SolverConfig) -> Result<EigenReport> {
    par::with_threads(cfg.threads, || {
        let op = inner_operator(pencil, cfg)?;
        let mut f = CompositeFilter::new(op, composite_coeffs(cfg.k2)?, cfg.gmres_tol, cfg.gmres_max_iter, cfg.ghost_tol);
        let mut r = subspace_iterate(&mut f, pencil, cfg)?;
        r.mode = Mode::Composite;
        Ok(r)
    })
}

struct Column {
    ws: Option<KrylovWorkspace>,
    out: Option<Result<(Vec<Complex64>, usize)>>,
}

/// Composite filter without subspace iteration: `Ỹ = G(Y)` once, then
/// rounds of multi-shift GMRES on the stored Krylov data with `k2` doubled
/// after each round until convergence or `k2_max`.
pub fn solve_adaptive(pencil: &MatrixPencil, cfg: &SolverConfig) -> Result<EigenReport> {
    par::with_threads(cfg.threads, || {
        let op = inner_operator(pencil, cfg)?;
        let y = random_start(pencil.dim(), cfg.n_col(), cfg.seed)?;
        let gy = op.apply_block(&y)?;
        let mut cols: Vec<Column> = gy
            .columns()
            .map(|b| Column {
                ws: KrylovWorkspace::new(b).ok(),
                out: None,
            })
            .collect();
        let mut trace = IterationTrace::default();
        let mut gmres_total = 0;
        let mut k2 = cfg.k2;
        let mut converged = false;
        let mut round = 0;
        let proj = loop {
            round += 1;
            let coeffs = composite_coeffs(k2)?;
            par::for_each_mut(&mut cols, |j, col| {
                let b = gy.col(j);
                col.out = Some(match &mut col.ws {
                    None => Ok((b.to_vec(), 0)),
                    Some(ws) => {
                        let res = ws.solve_shifts(&op, &coeffs.shifts, cfg.gmres_tol, cfg.gmres_max_iter);
                        filter::check_stall(&res, cfg.ghost_tol)
                            .and_then(|_| combine_solutions(&res, &coeffs, b))
                            .map(|u| (u, res.new_applications))
                    }
                });
            });
            let mut u = Vec::with_capacity(cols.len());
            let mut iters = Vec::with_capacity(cols.len());
            for col in cols.iter_mut() {
                let (v, it) = col.out.take().expect("every column solved")?;
                u.push(v);
                iters.push(it);
            }
            gmres_total += iters.iter().sum::<usize>();
            let proj = project(pencil, cfg, &DenseMatrix::from_columns(pencil.dim(), &u)?)?;
            trace.push(record(round, k2, &proj, iters, OperationCounts::of(&op, gmres_total)));
            if check_convergence(&trace, cfg.tol, 2) {
                converged = true;
                break proj;
            }
            if 2 * k2 > cfg.k2_max {
                break proj;
            }
            k2 *= 2;
        };
        let run = RunState {
            trace,
            converged,
            final_k2: k2,
            counts: OperationCounts::of(&op, gmres_total),
        };
        let mut r = build_report(pencil, cfg, proj, run)?;
        r.mode = Mode::Adaptive;
        Ok(r)
    })
}

/// Runs the solver selected by `cfg.mode`.
pub fn solve(pencil: &MatrixPencil, cfg: &SolverConfig) -> Result<EigenReport> {
    match cfg.mode {
        Mode::Simple => solve_simple(pencil, cfg),
        Mode::Composite => solve_fixed_composite(pencil, cfg),
        Mode::Adaptive => solve_adaptive(pencil, cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pencil::{ComplexSparseMatrix, DiskRegion};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn diagonal(values: &[Complex64]) -> MatrixPencil {
        MatrixPencil::new(
            ComplexSparseMatrix::from_diagonal(values),
            ComplexSparseMatrix::identity(values.len()),
        )
        .unwrap()
    }

    #[test]
    fn exact_projector_converges_immediately() {
        let vals: Vec<Complex64> = (0..12).map(|i| c(0.5 * i as f64, 0.1 * i as f64)).collect();
        let pencil = diagonal(&vals);
        let region = DiskRegion::new(c(0.25, 0.05), 0.4).unwrap();
        let proj: Vec<Complex64> = vals
            .iter()
            .map(|&v| if region.contains(v) { c(1.0, 0.0) } else { c(0.0, 0.0) })
            .collect();
        let mut cfg = SolverConfig::new(region, 2);
        cfg.n_col = Some(2);
        let mut f = DenseFilter(DenseMatrix::from_diagonal(&proj));
        let r = subspace_iterate(&mut f, &pencil, &cfg).unwrap();
        assert!(r.converged);
        assert_eq!(r.eigenvalues.len(), 2);
        assert!(r.residuals.iter().all(|&x| x < 1e-12));
        assert_eq!(r.trace.records[0].p, 2);
        assert!(r.trace.records[0].max_residual.unwrap() < 1e-12);
    }

    #[test]
    fn modes_agree_on_diagonal_pencil() {
        let vals: Vec<Complex64> = (0..60).map(|i| c((i as f64 * 0.37).sin() * 3.0, (i as f64 * 0.91).cos() * 3.0)).collect();
        let pencil = diagonal(&vals);
        let region = DiskRegion::new(c(0.0, 0.0), 1.5).unwrap();
        let inside: usize = vals.iter().filter(|&&v| region.contains(v)).count();
        let mut cfg = SolverConfig::new(region, inside);
        cfg.k1 = 4;
        cfg.k2 = 4;
        let simple = solve_simple(&pencil, &cfg).unwrap();
        assert!(simple.converged);
        assert_eq!(simple.eigenvalues.len(), inside);
        cfg.mode = Mode::Composite;
        let comp = solve(&pencil, &cfg).unwrap();
        assert!(comp.converged);
        cfg.mode = Mode::Adaptive;
        let adap = solve(&pencil, &cfg).unwrap();
        assert!(adap.converged);
        for r in [&comp, &adap] {
            assert_eq!(r.eigenvalues.len(), inside);
            for (a, b) in r.eigenvalues.iter().zip(&simple.eigenvalues) {
                assert!((a - b).norm() < 1e-8);
            }
        }
        assert_eq!(adap.counts.g_blocks, 1 + adap.counts.gmres_iterations);
    }

    #[test]
    fn composite_k2_one_matches_simple() {
        let vals: Vec<Complex64> = (0..40).map(|i| c(i as f64 * 0.1 - 2.0, (i % 3) as f64 * 0.2)).collect();
        let pencil = diagonal(&vals);
        let region = DiskRegion::new(c(0.0, 0.2), 0.5).unwrap();
        let inside = vals.iter().filter(|&&v| region.contains(v)).count();
        let mut cfg = SolverConfig::new(region, inside);
        cfg.k1 = 8;
        cfg.k2 = 1;
        let simple = solve_simple(&pencil, &cfg).unwrap();
        cfg.mode = Mode::Composite;
        let comp = solve(&pencil, &cfg).unwrap();
        assert_eq!(simple.eigenvalues.len(), comp.eigenvalues.len());
        for (a, b) in simple.eigenvalues.iter().zip(&comp.eigenvalues) {
            assert!((a - b).norm() < 1e-10);
        }
        assert_eq!(simple.iterations, comp.iterations);
    }
}
