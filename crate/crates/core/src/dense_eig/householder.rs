use num_complex::Complex64;

use crate::dense::{norm2, DenseMatrix};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Reflector `H = I − τ v vᴴ` with `H x = α e₁`, acting on rows
/// `offset..offset + v.len()`.
#[derive(Debug, Clone)]
pub(crate) struct Reflector {
    pub offset: usize,
    pub v: Vec<Complex64>,
    pub tau: f64,
    pub alpha: Complex64,
}

impl Reflector {
    /// Builds the reflector for `x`. A zero `x` yields the identity (`τ = 0`).
    pub fn new(offset: usize, x: &[Complex64]) -> Self {
        let norm = norm2(x);
        if norm == 0.0 {
            return Self {
                offset,
                v: x.to_vec(),
                tau: 0.0,
                alpha: ZERO,
            };
        }
        let phase = if x[0] == ZERO { Complex64::new(1.0, 0.0) } else { x[0] / x[0].norm() };
        let alpha = -phase * norm;
        let mut v = x.to_vec();
        v[0] -= alpha;
        let vv: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        Self {
            offset,
            v,
            tau: 2.0 / vv,
            alpha,
        }
    }

    /// `M ← H M` on columns `cols`.
    pub fn apply_left(&self, m: &mut DenseMatrix, cols: std::ops::Range<usize>) {
        if self.tau == 0.0 {
            return;
        }
        let o = self.offset;
        for j in cols {
            let col = &mut m.col_mut(j)[o..o + self.v.len()];
            let w: Complex64 = self.v.iter().zip(col.iter()).map(|(v, c)| v.conj() * c).sum();
            let f = w * self.tau;
            for (c, v) in col.iter_mut().zip(&self.v) {
                *c -= f * v;
            }
        }
    }

    /// `M ← M H` on rows `rows`.
    pub fn apply_right(&self, m: &mut DenseMatrix, rows: std::ops::Range<usize>) {
        if self.tau == 0.0 {
            return;
        }
        let o = self.offset;
        let mut w = vec![ZERO; rows.len()];
        for (k, v) in self.v.iter().enumerate() {
            let col = m.col(o + k);
            for (wi, i) in w.iter_mut().zip(rows.clone()) {
                *wi += col[i] * v;
            }
        }
        for (k, v) in self.v.iter().enumerate() {
            let f = v.conj() * self.tau;
            let col = m.col_mut(o + k);
            for (wi, i) in w.iter().zip(rows.clone()) {
                col[i] -= wi * f;
            }
        }
    }
}

/// Householder QR `A = Q R`. Returns the reflectors and leaves `R` in `a`.
pub(crate) fn qr_in_place(a: &mut DenseMatrix) -> Vec<Reflector> {
    let (m, n) = (a.n_rows(), a.n_cols());
    let steps = m.min(n);
    let mut refl = Vec::with_capacity(steps);
    for k in 0..steps {
        let h = Reflector::new(k, &a.col(k)[k..]);
        h.apply_left(a, k..n);
        for i in (k + 1)..m {
            a[(i, k)] = ZERO;
        }
        refl.push(h);
    }
    refl
}

/// Explicit `Q[:, ..n_cols]` from reflectors of an `m`-row factorization.
pub(crate) fn form_q(reflectors: &[Reflector], m: usize, n_cols: usize) -> DenseMatrix {
    let mut q = DenseMatrix::zeros(m, n_cols);
    for j in 0..n_cols {
        q[(j, j)] = Complex64::new(1.0, 0.0);
    }
    for h in reflectors.iter().rev() {
        h.apply_left(&mut q, 0..n_cols);
    }
    q
}
