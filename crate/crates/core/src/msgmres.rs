//! Multi-shift GMRES.
//!
//! One Arnoldi basis of `K_n(G, b)` serves every shifted system
//! `(G − s I) x = b`, because `(G − s I) V_n = V_{n+1} (H̃_n − s Ĩ)`. Each
//! shift keeps its own Givens rotations over the shared Hessenberg matrix.
//! The workspace keeps the basis, so shifts added later are solved by
//! replaying the stored Hessenberg columns before any new operator
//! application.

use num_complex::Complex64;

use crate::dense::{axpy, dot, norm2, DenseMatrix};
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const BREAKDOWN_TOL: f64 = 1e-14;

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_ITER: usize = 200;

/// A square linear operator applied one vector at a time.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[Complex64]) -> Vec<Complex64>;
}

impl LinearOperator for DenseMatrix {
    fn dim(&self) -> usize {
        self.n_rows()
    }

    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.matvec(x).expect("operator and vector dimensions agree")
    }
}

/// `diag(d)` as an operator.
#[derive(Debug, Clone)]
pub struct DiagonalOperator(pub Vec<Complex64>);

impl LinearOperator for DiagonalOperator {
    fn dim(&self) -> usize {
        self.0.len()
    }

    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.0.iter().zip(x).map(|(d, v)| d * v).collect()
    }
}

#[derive(Debug, Clone, Copy)]
struct Givens {
    c: f64,
    s: Complex64,
}

impl Givens {
    fn zeroing(f: Complex64, g: Complex64) -> Self {
        if g == ZERO {
            return Self { c: 1.0, s: ZERO };
        }
        if f == ZERO {
            return Self {
                c: 0.0,
                s: Complex64::new(1.0, 0.0),
            };
        }
        let fa = f.norm();
        let rho = fa.hypot(g.norm());
        Self {
            c: fa / rho,
            s: (f / fa) * g.conj() / rho,
        }
    }

    fn apply(self, x: &mut Complex64, y: &mut Complex64) {
        let (a, b) = (*x, *y);
        *x = self.c * a + self.s * b;
        *y = -self.s.conj() * a + self.c * b;
    }
}

/// Least-squares state of one shift over the shared Hessenberg matrix.
#[derive(Debug, Clone)]
struct ShiftState {
    shift: Complex64,
    tol: f64,
    rotations: Vec<Givens>,
    /// Columns of the triangular factor of `H̃ − s Ĩ`.
    r: Vec<Vec<Complex64>>,
    /// Rotated right-hand side `Qᴴ β e₁`.
    g: Vec<Complex64>,
    residual: f64,
    converged_at: Option<usize>,
    solution: Option<Vec<Complex64>>,
}

impl ShiftState {
    fn new(shift: Complex64, tol: f64, beta: f64) -> Self {
        Self {
            shift,
            tol,
            rotations: Vec::new(),
            r: Vec::new(),
            g: vec![Complex64::new(beta, 0.0)],
            residual: beta,
            converged_at: None,
            solution: None,
        }
    }

    fn columns_seen(&self) -> usize {
        self.r.len()
    }

    /// Absorbs Hessenberg column `j`; returns true once converged.
    fn absorb(&mut self, h: &[Complex64], beta: f64) -> bool {
        let j = self.r.len();
        let mut col = h.to_vec();
        col[j] -= self.shift;
        for (i, rot) in self.rotations.iter().enumerate() {
            let (top, bottom) = col.split_at_mut(i + 1);
            rot.apply(&mut top[i], &mut bottom[0]);
        }
        let rot = Givens::zeroing(col[j], col[j + 1]);
        {
            let (top, bottom) = col.split_at_mut(j + 1);
            rot.apply(&mut top[j], &mut bottom[0]);
        }
        col.truncate(j + 1);
        self.g.push(ZERO);
        {
            let (top, bottom) = self.g.split_at_mut(j + 1);
            rot.apply(&mut top[j], &mut bottom[0]);
        }
        self.rotations.push(rot);
        let solvable = col[j] != ZERO;
        self.r.push(col);
        self.residual = self.g[j + 1].norm();
        solvable && self.residual <= self.tol * beta
    }

    /// `y` solving `R y = g[..m]` for the first `m` columns.
    fn coefficients(&self, m: usize) -> Vec<Complex64> {
        let mut y: Vec<Complex64> = self.g[..m].to_vec();
        for j in (0..m).rev() {
            let d = self.r[j][j];
            y[j] = if d == ZERO { ZERO } else { y[j] / d };
            let yj = y[j];
            for i in 0..j {
                y[i] -= self.r[j][i] * yj;
            }
        }
        y
    }
}

/// Persistent Arnoldi data for one right-hand side.
#[derive(Debug, Clone)]
pub struct KrylovWorkspace {
    basis: Vec<Vec<Complex64>>,
    /// Column `j` has `j + 2` entries: `H[0..=j+1, j]`.
    hessenberg: Vec<Vec<Complex64>>,
    h_norm_sq: f64,
    beta: f64,
    breakdown: bool,
    op_applications: usize,
    shifts: Vec<ShiftState>,
}

/// Per-shift outcome of a multi-shift solve.
#[derive(Debug, Clone)]
pub struct ShiftedSolveResult {
    pub shifts: Vec<Complex64>,
    pub solutions: Vec<Vec<Complex64>>,
    /// Least-squares residual norms `‖b − (G − s I) x‖`.
    pub residual_norms: Vec<f64>,
    /// Basis dimension at which each solution was formed.
    pub iterations: Vec<usize>,
    pub converged: Vec<bool>,
    /// `‖b‖`.
    pub rhs_norm: f64,
    /// Operator applications made by this call.
    pub new_applications: usize,
}

impl ShiftedSolveResult {
    pub fn all_converged(&self) -> bool {
        self.converged.iter().all(|&c| c)
    }

    /// Largest residual relative to `‖b‖`.
    pub fn max_relative_residual(&self) -> f64 {
        self.residual_norms.iter().fold(0.0, |m, &r| m.max(r / self.rhs_norm))
    }

    pub fn solution_for(&self, shift: Complex64) -> Option<&[Complex64]> {
        self.shifts.iter().position(|&s| s == shift).map(|i| self.solutions[i].as_slice())
    }
}

impl KrylovWorkspace {
    pub fn new(b: &[Complex64]) -> Result<Self> {
        let beta = norm2(b);
        if beta == 0.0 || !beta.is_finite() {
            return Err(Error::ZeroInput);
        }
        let v0: Vec<Complex64> = b.iter().map(|x| x / beta).collect();
        Ok(Self {
            basis: vec![v0],
            hessenberg: Vec::new(),
            h_norm_sq: 0.0,
            beta,
            breakdown: false,
            op_applications: 0,
            shifts: Vec::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.basis[0].len()
    }

    /// Current Krylov dimension `n`.
    pub fn size(&self) -> usize {
        self.hessenberg.len()
    }

    pub fn rhs_norm(&self) -> f64 {
        self.beta
    }

    pub fn breakdown(&self) -> bool {
        self.breakdown
    }

    pub fn op_applications(&self) -> usize {
        self.op_applications
    }

    /// `V_{n+1}` (or `V_n` after a breakdown) as a dense block.
    pub fn basis(&self) -> DenseMatrix {
        DenseMatrix::from_columns(self.dim(), &self.basis).expect("basis vectors share a length")
    }

    pub fn basis_vector(&self, i: usize) -> &[Complex64] {
        &self.basis[i]
    }

    /// `H̃_n`, of size `(n + 1) × n`.
    pub fn hessenberg(&self) -> DenseMatrix {
        let n = self.size();
        let mut h = DenseMatrix::zeros(n + 1, n);
        for (j, col) in self.hessenberg.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                h[(i, j)] = v;
            }
        }
        h
    }

    /// Grows the basis by up to `steps` Arnoldi steps; stops early on a
    /// happy breakdown. Returns the number of steps taken.
    pub fn arnoldi_extend(&mut self, op: &dyn LinearOperator, steps: usize) -> usize {
        let mut taken = 0;
        while taken < steps && !self.breakdown {
            self.arnoldi_step(op);
            taken += 1;
        }
        taken
    }

    fn arnoldi_step(&mut self, op: &dyn LinearOperator) {
        let n = self.size();
        let mut w = op.apply(&self.basis[n]);
        self.op_applications += 1;
        let mut h = vec![ZERO; n + 2];
        let before = norm2(&w);
        for (i, v) in self.basis.iter().enumerate() {
            let hi = dot(v, &w);
            axpy(-hi, v, &mut w);
            h[i] = hi;
        }
        let mut after = norm2(&w);
        if after < before * std::f64::consts::FRAC_1_SQRT_2 {
            for (i, v) in self.basis.iter().enumerate() {
                let hi = dot(v, &w);
                axpy(-hi, v, &mut w);
                h[i] += hi;
            }
            after = norm2(&w);
        }
        self.h_norm_sq += h[..=n].iter().map(|v| v.norm_sqr()).sum::<f64>() + after * after;
        if after <= BREAKDOWN_TOL * self.h_norm_sq.sqrt() {
            h[n + 1] = ZERO;
            self.breakdown = true;
        } else {
            h[n + 1] = Complex64::new(after, 0.0);
            w.iter_mut().for_each(|x| *x /= after);
            self.basis.push(w);
        }
        self.hessenberg.push(h);
    }

    fn state_index(&mut self, shift: Complex64, tol: f64) -> usize {
        if let Some(i) = self.shifts.iter().position(|s| s.shift == shift && s.tol == tol) {
            return i;
        }
        let mut st = ShiftState::new(shift, tol, self.beta);
        // Replay the stored Hessenberg columns, freezing at the first column
        // that meets the tolerance exactly as a fresh run would.
        for j in 0..self.size() {
            if st.absorb(&self.hessenberg[j], self.beta) {
                self.freeze(&mut st, j + 1);
                break;
            }
        }
        self.shifts.push(st);
        self.shifts.len() - 1
    }

    fn combine_basis(&self, y: &[Complex64]) -> Vec<Complex64> {
        let mut x = vec![ZERO; self.dim()];
        for (v, &c) in self.basis.iter().zip(y) {
            axpy(c, v, &mut x);
        }
        x
    }

    fn freeze(&self, st: &mut ShiftState, m: usize) {
        let y = st.coefficients(m);
        st.solution = Some(self.combine_basis(&y));
        st.converged_at = Some(m);
    }

    /// Solves `(G − s I) x = b` for every shift in `shifts`, reusing stored
    /// basis vectors and previously converged shifts, and extending the basis
    /// only while some requested shift is unconverged.
    pub fn solve_shifts(
        &mut self,
        op: &dyn LinearOperator,
        shifts: &[Complex64],
        tol: f64,
        max_iter: usize,
    ) -> ShiftedSolveResult {
        let start_apps = self.op_applications;
        let idx: Vec<usize> = shifts.iter().map(|&s| self.state_index(s, tol)).collect();
        loop {
            let pending = idx.iter().any(|&i| self.shifts[i].converged_at.is_none());
            if !pending || self.breakdown || self.size() >= max_iter {
                break;
            }
            self.arnoldi_step(op);
            let j = self.size() - 1;
            let beta = self.beta;
            let mut states = std::mem::take(&mut self.shifts);
            for st in states.iter_mut() {
                if st.converged_at.is_none() && st.columns_seen() == j && st.absorb(&self.hessenberg[j], beta) {
                    self.freeze(st, j + 1);
                }
            }
            self.shifts = states;
        }

        let mut result = ShiftedSolveResult {
            shifts: shifts.to_vec(),
            solutions: Vec::with_capacity(shifts.len()),
            residual_norms: Vec::with_capacity(shifts.len()),
            iterations: Vec::with_capacity(shifts.len()),
            converged: Vec::with_capacity(shifts.len()),
            rhs_norm: self.beta,
            new_applications: self.op_applications - start_apps,
        };
        for &i in &idx {
            let st = &self.shifts[i];
            match (&st.solution, st.converged_at) {
                (Some(x), Some(m)) => {
                    result.solutions.push(x.clone());
                    result.iterations.push(m);
                    result.converged.push(true);
                }
                _ => {
                    // Best least-squares iterate from the current basis.
                    let m = st.columns_seen();
                    let y = st.coefficients(m);
                    result.solutions.push(self.combine_basis(&y));
                    result.iterations.push(m);
                    result.converged.push(false);
                }
            }
            result.residual_norms.push(st.residual);
        }
        result
    }

    /// Adds `new_shifts` to a workspace built for the same `(G, b)`.
    pub fn extend_shifts(
        &mut self,
        op: &dyn LinearOperator,
        new_shifts: &[Complex64],
        tol: f64,
        max_iter: usize,
    ) -> ShiftedSolveResult {
        self.solve_shifts(op, new_shifts, tol, max_iter)
    }
}

/// Fresh workspace plus [`KrylovWorkspace::solve_shifts`].
pub fn solve_all_shifts(
    op: &dyn LinearOperator,
    b: &[Complex64],
    shifts: &[Complex64],
    tol: f64,
    max_iter: usize,
) -> Result<(ShiftedSolveResult, KrylovWorkspace)> {
    if b.len() != op.dim() {
        return Err(Error::Dimension(format!(
            "operator of dimension {} with right-hand side of length {}",
            op.dim(),
            b.len()
        )));
    }
    let mut ws = KrylovWorkspace::new(b)?;
    let res = ws.solve_shifts(op, shifts, tol, max_iter);
    Ok((res, ws))
}

/// `U = −Σ c_j U_j + direct·G b` with `U_j = (G − s_j I)⁻¹ G b`, i.e. the
/// shifted solves take `G b` as right-hand side. Since
/// `c G (s I − G)⁻¹ = −c (G − s I)⁻¹ G`, this is the block form of
/// `CompositeCoeffs::apply_scalar`.
pub fn combine_solutions(
    results: &ShiftedSolveResult,
    coeffs: &crate::rational::CompositeCoeffs,
    gb: &[Complex64],
) -> Result<Vec<Complex64>> {
    let mut u = vec![ZERO; gb.len()];
    for (&s, &c) in coeffs.shifts.iter().zip(&coeffs.weights) {
        let x = results
            .solution_for(s)
            .ok_or_else(|| Error::InvalidArgument(format!("no solution for shift {s}")))?;
        axpy(-c, x, &mut u);
    }
    if coeffs.direct_term != ZERO {
        axpy(coeffs.direct_term, gb, &mut u);
    }
    Ok(u)
}
