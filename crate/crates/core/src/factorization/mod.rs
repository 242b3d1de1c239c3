//! Shifted factorizations `p·B − A` and the inner filter operator
//! `G = Σ_i w_i (p_i B − A)⁻¹ B`.

mod ordering;
mod sparse_lu;

use std::sync::atomic::{AtomicUsize, Ordering};

use num_complex::Complex64;

use crate::dense::{DenseLu, DenseMatrix};
use crate::error::{Error, Result};
use crate::msgmres::LinearOperator;
use crate::par;
use crate::pencil::{ComplexSparseMatrix, MatrixPencil};
use crate::rational::PolesWeights;

pub use ordering::{minimum_degree, symmetric_pattern};
pub use sparse_lu::{ColumnView, SparseLu};

/// Systems smaller than this are factored densely.
pub const DENSE_CUTOFF: usize = 500;
/// Relative pivot threshold of the sparse LU.
pub const PIVOT_TOL: f64 = 0.1;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug)]
enum Backend {
    Dense(DenseLu),
    Sparse(SparseLu),
}

/// LU factors of `pole·B − A`.
#[derive(Debug)]
pub struct ShiftedFactor {
    shift: Complex64,
    backend: Backend,
    solves: AtomicUsize,
}

impl ShiftedFactor {
    pub fn shift(&self) -> Complex64 {
        self.shift
    }

    pub fn dim(&self) -> usize {
        match &self.backend {
            Backend::Dense(lu) => lu.dim(),
            Backend::Sparse(lu) => lu.dim(),
        }
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.backend, Backend::Sparse(_))
    }

    /// Number of single-vector solves made with these factors.
    pub fn solve_count(&self) -> usize {
        self.solves.load(Ordering::Relaxed)
    }

    pub fn solve_in_place(&self, b: &mut [Complex64]) {
        self.solves.fetch_add(1, Ordering::Relaxed);
        match &self.backend {
            Backend::Dense(lu) => lu.solve_in_place(b),
            Backend::Sparse(lu) => lu.solve_in_place(b),
        }
    }

    pub fn solve(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        if b.len() != self.dim() {
            return Err(Error::Dimension(format!(
                "right-hand side of length {} for a system of dimension {}",
                b.len(),
                self.dim()
            )));
        }
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        Ok(x)
    }

    pub fn solve_block(&self, b: &DenseMatrix) -> Result<DenseMatrix> {
        if b.n_rows() != self.dim() {
            return Err(Error::Dimension(format!(
                "block with {} rows for a system of dimension {}",
                b.n_rows(),
                self.dim()
            )));
        }
        let mut x = b.clone();
        for col in x.columns_mut() {
            self.solve_in_place(col);
        }
        Ok(x)
    }
}

/// Fill-reducing column order for every shifted matrix of `pencil`.
///
/// The pattern of `p·B − A` is contained in that of `A ∪ B` for all `p`, so
/// one order serves all poles.
pub fn fill_ordering(pencil: &MatrixPencil) -> Vec<usize> {
    let union = pencil
        .b()
        .linear_combination(Complex64::new(1.0, 0.0), pencil.a(), Complex64::new(1.0, 0.0))
        .expect("pencil matrices share dimensions");
    minimum_degree(&symmetric_pattern(union.n_rows(), union.row_offsets(), union.col_indices()))
}

fn factor_matrix(k: &ComplexSparseMatrix, pole: Complex64, order: Option<&[usize]>) -> Result<ShiftedFactor> {
    let n = k.n_rows();
    let backend = if n < DENSE_CUTOFF {
        Backend::Dense(DenseLu::factor(&k.to_dense()).map_err(|_| Error::SingularPole { pole })?)
    } else {
        let owned;
        let q = match order {
            Some(q) => q,
            None => {
                owned = minimum_degree(&symmetric_pattern(n, k.row_offsets(), k.col_indices()));
                &owned
            }
        };
        let kt = k.transpose();
        let view = ColumnView {
            col_ptr: kt.row_offsets(),
            rows: kt.col_indices(),
            vals: kt.values(),
        };
        Backend::Sparse(SparseLu::factor(&view, q, PIVOT_TOL).map_err(|_| Error::SingularPole { pole })?)
    };
    Ok(ShiftedFactor {
        shift: pole,
        backend,
        solves: AtomicUsize::new(0),
    })
}

/// Factors `pole·B − A`.
pub fn factorize_shifted(pencil: &MatrixPencil, pole: Complex64) -> Result<ShiftedFactor> {
    factor_matrix(&pencil.shifted(pole), pole, None)
}

/// Factors `pole·B − A` with a precomputed column order.
pub fn factorize_shifted_ordered(pencil: &MatrixPencil, pole: Complex64, order: &[usize]) -> Result<ShiftedFactor> {
    if order.len() != pencil.dim() {
        return Err(Error::Dimension(format!(
            "column order of length {} for dimension {}",
            order.len(),
            pencil.dim()
        )));
    }
    factor_matrix(&pencil.shifted(pole), pole, Some(order))
}

/// `G = Σ_i w_i (p_i B − A)⁻¹ B` with all factorizations held in memory.
#[derive(Debug)]
pub struct InnerFilterOperator {
    factors: Vec<ShiftedFactor>,
    weights: Vec<Complex64>,
    b: ComplexSparseMatrix,
    columns_applied: AtomicUsize,
    blocks_applied: AtomicUsize,
}

/// Factors every pole of `pw` (in parallel) and assembles `G`.
pub fn build_inner_operator(pencil: &MatrixPencil, pw: &PolesWeights) -> Result<InnerFilterOperator> {
    let order = if pencil.dim() >= DENSE_CUTOFF {
        Some(fill_ordering(pencil))
    } else {
        None
    };
    let factors = par::map_indexed(pw.poles.len(), |i| {
        factor_matrix(&pencil.shifted(pw.poles[i]), pw.poles[i], order.as_deref())
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(InnerFilterOperator {
        factors,
        weights: pw.weights.clone(),
        b: pencil.b().clone(),
        columns_applied: AtomicUsize::new(0),
        blocks_applied: AtomicUsize::new(0),
    })
}

impl InnerFilterOperator {
    pub fn dim(&self) -> usize {
        self.b.n_rows()
    }

    /// Number of poles `k1`.
    pub fn n_poles(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[ShiftedFactor] {
        &self.factors
    }

    /// Block applications of `G` (a single vector counts as a block of one).
    pub fn apply_count(&self) -> usize {
        self.blocks_applied.load(Ordering::Relaxed)
    }

    /// Columns `G` has been applied to.
    pub fn column_count(&self) -> usize {
        self.columns_applied.load(Ordering::Relaxed)
    }

    /// Triangular solve pairs across all poles.
    pub fn solve_count(&self) -> usize {
        self.factors.iter().map(ShiftedFactor::solve_count).sum()
    }

    pub fn reset_counters(&self) {
        self.columns_applied.store(0, Ordering::Relaxed);
        self.blocks_applied.store(0, Ordering::Relaxed);
        for f in &self.factors {
            f.solves.store(0, Ordering::Relaxed);
        }
    }

    fn pole_term(&self, i: usize, by: &[Complex64]) -> Vec<Complex64> {
        let mut x = by.to_vec();
        self.factors[i].solve_in_place(&mut x);
        let w = self.weights[i];
        x.iter_mut().for_each(|v| *v *= w);
        x
    }

    fn sum_terms(&self, terms: impl Iterator<Item = Vec<Complex64>>) -> Vec<Complex64> {
        let mut acc = vec![ZERO; self.dim()];
        for t in terms {
            acc.iter_mut().zip(&t).for_each(|(a, v)| *a += v);
        }
        acc
    }

    /// `G y`.
    pub fn apply_vec(&self, y: &[Complex64]) -> Result<Vec<Complex64>> {
        let by = self.b.spmv(y)?;
        self.columns_applied.fetch_add(1, Ordering::Relaxed);
        self.blocks_applied.fetch_add(1, Ordering::Relaxed);
        let terms = par::map_indexed(self.n_poles(), |i| self.pole_term(i, &by));
        Ok(self.sum_terms(terms.into_iter()))
    }

    /// `G Y`, fanned out over (column, pole) pairs and summed per column in
    /// ascending pole order.
    pub fn apply_block(&self, y: &DenseMatrix) -> Result<DenseMatrix> {
        let by = self.b.spmm(y)?;
        let (k1, m) = (self.n_poles(), y.n_cols());
        self.columns_applied.fetch_add(m, Ordering::Relaxed);
        self.blocks_applied.fetch_add(1, Ordering::Relaxed);
        let terms = par::map_indexed(m * k1, |t| self.pole_term(t % k1, by.col(t / k1)));
        let mut terms = terms.into_iter();
        let cols: Vec<Vec<Complex64>> = (0..m).map(|_| self.sum_terms(terms.by_ref().take(k1))).collect();
        DenseMatrix::from_columns(self.dim(), &cols)
    }
}

impl LinearOperator for InnerFilterOperator {
    fn dim(&self) -> usize {
        InnerFilterOperator::dim(self)
    }

    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.apply_vec(x).expect("operator and vector dimensions agree")
    }
}

/// `R(A, B) Y` for the rule `pw`, factoring each pole once.
pub fn apply_simple_filter(pencil: &MatrixPencil, pw: &PolesWeights, y: &DenseMatrix) -> Result<DenseMatrix> {
    build_inner_operator(pencil, pw)?.apply_block(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pencil::DiskRegion;
    use crate::rational::{eval_compact, trapezoid_rule};
    use crate::rng::{complex_normal, seeded};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_sparse(n: usize, per_row: usize, seed: u64) -> ComplexSparseMatrix {
        use rand::Rng;
        let mut rng = seeded(seed);
        let mut t = Vec::new();
        for r in 0..n {
            t.push((r, r, c(4.0 + r as f64 * 0.01, 1.0)));
            for _ in 0..per_row {
                let col = rng.random_range(0..n);
                t.push((r, col, complex_normal(&mut rng)));
            }
        }
        ComplexSparseMatrix::from_triplets(n, n, t, crate::pencil::Duplicates::Sum).unwrap()
    }

    fn residual(k: &ComplexSparseMatrix, x: &[Complex64], b: &[Complex64]) -> f64 {
        let kx = k.spmv(x).unwrap();
        let num: f64 = kx.iter().zip(b).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        num / b.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    #[test]
    fn sparse_and_dense_backends_solve() {
        for n in [40, 700] {
            let a = random_sparse(n, 3, n as u64);
            let pencil = MatrixPencil::new(a, ComplexSparseMatrix::identity(n)).unwrap();
            let pole = c(0.5, 2.0);
            let f = factorize_shifted(&pencil, pole).unwrap();
            assert_eq!(f.is_sparse(), n >= DENSE_CUTOFF);
            let mut rng = seeded(1);
            let b: Vec<Complex64> = (0..n).map(|_| complex_normal(&mut rng)).collect();
            let x = f.solve(&b).unwrap();
            assert!(residual(&pencil.shifted(pole), &x, &b) < 1e-12);
            assert_eq!(f.solve_count(), 1);
        }
    }

    #[test]
    fn singular_pole_is_reported() {
        let a = ComplexSparseMatrix::from_diagonal(&[c(1.0, 0.0), c(2.0, 0.0)]);
        let pencil = MatrixPencil::new(a, ComplexSparseMatrix::identity(2)).unwrap();
        assert!(matches!(
            factorize_shifted(&pencil, c(2.0, 0.0)),
            Err(Error::SingularPole { .. })
        ));
    }

    #[test]
    fn singular_sparse_pole_is_reported() {
        let n = 600;
        let d: Vec<Complex64> = (0..n).map(|i| c(i as f64, 0.0)).collect();
        let pencil = MatrixPencil::new(ComplexSparseMatrix::from_diagonal(&d), ComplexSparseMatrix::identity(n)).unwrap();
        assert!(matches!(
            factorize_shifted(&pencil, c(17.0, 0.0)),
            Err(Error::SingularPole { .. })
        ));
    }

    #[test]
    fn inner_operator_maps_eigenvalues_through_filter() {
        let region = DiskRegion::new(c(1.0, -1.0), 2.0).unwrap();
        let lambdas = [c(1.2, -0.7), c(2.5, -1.0), c(-2.0, 0.5), c(1.0, 1.5), c(6.0, 0.0)];
        let a = ComplexSparseMatrix::from_diagonal(&lambdas);
        let pencil = MatrixPencil::new(a, ComplexSparseMatrix::identity(5)).unwrap();
        let pw = trapezoid_rule(&region, 8).unwrap();
        let g = build_inner_operator(&pencil, &pw).unwrap();
        let out = g.apply_block(&DenseMatrix::identity(5)).unwrap();
        for (i, &l) in lambdas.iter().enumerate() {
            let r = eval_compact(&region, 8, l).unwrap();
            assert!((out[(i, i)] - r).norm() < 1e-13);
        }
        assert_eq!(g.apply_count(), 1);
        assert_eq!(g.column_count(), 5);
        assert_eq!(g.solve_count(), 40);
    }

    #[test]
    fn block_and_vector_applications_agree() {
        let n = 30;
        let pencil = MatrixPencil::new(random_sparse(n, 2, 3), random_sparse(n, 1, 4)).unwrap();
        let region = DiskRegion::new(c(0.0, 0.0), 3.0).unwrap();
        let pw = trapezoid_rule(&region, 6).unwrap();
        let g = build_inner_operator(&pencil, &pw).unwrap();
        let mut rng = seeded(9);
        let y = DenseMatrix::from_fn(n, 3, |_, _| complex_normal(&mut rng));
        let block = g.apply_block(&y).unwrap();
        for j in 0..3 {
            let v = g.apply_vec(y.col(j)).unwrap();
            assert_eq!(v.as_slice(), block.col(j));
        }
    }
}
