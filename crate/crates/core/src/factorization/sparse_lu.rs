//! Left-looking sparse LU with threshold partial pivoting.
//!
//! Column `k` of `L` and `U` comes from a sparse triangular solve with the
//! columns already factored; the nonzero pattern of that solve is found by a
//! depth-first search over the graph of `L`.

use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const UNSET: usize = usize::MAX;

/// Compressed sparse column storage.
#[derive(Debug, Clone, Default)]
struct Csc {
    col_ptr: Vec<usize>,
    rows: Vec<usize>,
    vals: Vec<Complex64>,
}

#[derive(Debug, Clone)]
pub struct SparseLu {
    n: usize,
    l: Csc,
    u: Csc,
    /// `pinv[row]` is the pivot step that eliminated `row`.
    pinv: Vec<usize>,
    /// Column order used during elimination.
    q: Vec<usize>,
}

/// Column-major view of a square matrix: column `j` holds `(row, value)` pairs.
pub struct ColumnView<'a> {
    pub col_ptr: &'a [usize],
    pub rows: &'a [usize],
    pub vals: &'a [Complex64],
}

impl SparseLu {
    /// Factors `K` with columns taken in the order `q` and pivot rows chosen
    /// with relative threshold `tol`, preferring the diagonal. Returns the
    /// first singular pivot step on failure.
    pub fn factor(k: &ColumnView<'_>, q: &[usize], tol: f64) -> std::result::Result<Self, usize> {
        let n = q.len();
        let mut l = Csc {
            col_ptr: Vec::with_capacity(n + 1),
            ..Default::default()
        };
        let mut u = Csc {
            col_ptr: Vec::with_capacity(n + 1),
            ..Default::default()
        };
        let mut pinv = vec![UNSET; n];
        let mut x = vec![ZERO; n];
        let mut mark = vec![0usize; n];
        let mut reach: Vec<usize> = Vec::with_capacity(n);
        let mut stack: Vec<(usize, usize)> = Vec::with_capacity(n);

        for (step, &col) in q.iter().enumerate() {
            l.col_ptr.push(l.rows.len());
            u.col_ptr.push(u.rows.len());
            let stamp = step + 1;

            // Topological order of the rows reached from K(:, col).
            reach.clear();
            let (lo, hi) = (k.col_ptr[col], k.col_ptr[col + 1]);
            for &start in &k.rows[lo..hi] {
                if mark[start] == stamp {
                    continue;
                }
                mark[start] = stamp;
                stack.push((start, first_child(&l, &pinv, start)));
                while let Some(&mut (node, ref mut next)) = stack.last_mut() {
                    let end = child_end(&l, &pinv, node);
                    let mut pushed = None;
                    while *next < end {
                        let child = l.rows[*next];
                        *next += 1;
                        if mark[child] != stamp {
                            pushed = Some(child);
                            break;
                        }
                    }
                    match pushed {
                        Some(child) => {
                            mark[child] = stamp;
                            stack.push((child, first_child(&l, &pinv, child)));
                        }
                        None => {
                            stack.pop();
                            reach.push(node);
                        }
                    }
                }
            }

            for (&r, &v) in k.rows[lo..hi].iter().zip(&k.vals[lo..hi]) {
                x[r] = v;
            }
            // Reverse postorder is a topological order.
            for &j in reach.iter().rev() {
                let jp = pinv[j];
                if jp == UNSET {
                    continue;
                }
                let xj = x[j];
                if xj == ZERO {
                    continue;
                }
                for p in (l.col_ptr[jp] + 1)..l.col_ptr[jp + 1] {
                    x[l.rows[p]] -= l.vals[p] * xj;
                }
            }

            let mut pivot_row = UNSET;
            let mut best = -1.0;
            for &i in reach.iter().rev() {
                if pinv[i] == UNSET {
                    let a = x[i].norm();
                    if a > best {
                        best = a;
                        pivot_row = i;
                    }
                } else {
                    u.rows.push(pinv[i]);
                    u.vals.push(x[i]);
                }
            }
            if pivot_row == UNSET || best <= 0.0 || !best.is_finite() {
                return Err(step);
            }
            if pinv[col] == UNSET && x[col].norm() >= tol * best {
                pivot_row = col;
            }
            let pivot = x[pivot_row];
            u.rows.push(step);
            u.vals.push(pivot);
            pinv[pivot_row] = step;
            l.rows.push(pivot_row);
            l.vals.push(Complex64::new(1.0, 0.0));
            for &i in reach.iter().rev() {
                if pinv[i] == UNSET {
                    l.rows.push(i);
                    l.vals.push(x[i] / pivot);
                }
                x[i] = ZERO;
            }
        }
        l.col_ptr.push(l.rows.len());
        u.col_ptr.push(u.rows.len());
        for r in &mut l.rows {
            *r = pinv[*r];
        }
        Ok(Self {
            n,
            l,
            u,
            pinv,
            q: q.to_vec(),
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Stored entries of `L` and `U`, diagonals included.
    pub fn nnz(&self) -> usize {
        self.l.rows.len() + self.u.rows.len()
    }

    /// Solves `K x = b` in place.
    pub fn solve_in_place(&self, b: &mut [Complex64]) {
        let n = self.n;
        let mut x = vec![ZERO; n];
        for (row, &v) in b.iter().enumerate() {
            x[self.pinv[row]] = v;
        }
        for j in 0..n {
            let xj = x[j];
            if xj != ZERO {
                for p in (self.l.col_ptr[j] + 1)..self.l.col_ptr[j + 1] {
                    x[self.l.rows[p]] -= self.l.vals[p] * xj;
                }
            }
        }
        for j in (0..n).rev() {
            let diag = self.u.col_ptr[j + 1] - 1;
            x[j] /= self.u.vals[diag];
            let xj = x[j];
            if xj != ZERO {
                for p in self.u.col_ptr[j]..diag {
                    x[self.u.rows[p]] -= self.u.vals[p] * xj;
                }
            }
        }
        for (k, &col) in self.q.iter().enumerate() {
            b[col] = x[k];
        }
    }

    /// Largest and smallest pivot magnitudes, a cheap conditioning hint.
    pub fn pivot_range(&self) -> (f64, f64) {
        (0..self.n)
            .map(|j| self.u.vals[self.u.col_ptr[j + 1] - 1].norm())
            .fold((0.0, f64::INFINITY), |(hi, lo), v| (hi.max(v), lo.min(v)))
    }
}

fn first_child(l: &Csc, pinv: &[usize], node: usize) -> usize {
    match pinv[node] {
        UNSET => 0,
        j => l.col_ptr[j],
    }
}

fn child_end(l: &Csc, pinv: &[usize], node: usize) -> usize {
    match pinv[node] {
        UNSET => 0,
        j => l.col_ptr[j + 1],
    }
}
