use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::householder::{qr_in_place, Reflector};
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const DEFLATION_TOL: f64 = 1e-14;
const SWEEPS_PER_DIM: usize = 30;

/// Plane rotation `[[c, s], [−s̄, c]]` with real `c`.
#[derive(Debug, Clone, Copy)]
struct Rot {
    c: f64,
    s: Complex64,
}

impl Rot {
    /// Rotation sending `(f, g)` to `(r, 0)`.
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

    fn pair(self, x: &mut Complex64, y: &mut Complex64) {
        let (a, b) = (*x, *y);
        *x = self.c * a + self.s * b;
        *y = -self.s.conj() * a + self.c * b;
    }

    fn adjoint(self) -> Self {
        Self {
            c: self.c,
            s: self.s.conj(),
        }
    }

    /// Rows `(i, j)` over columns `cols`.
    fn rows(self, m: &mut DenseMatrix, i: usize, j: usize, cols: std::ops::Range<usize>) {
        for k in cols {
            let mut a = m[(i, k)];
            let mut b = m[(j, k)];
            self.pair(&mut a, &mut b);
            m[(i, k)] = a;
            m[(j, k)] = b;
        }
    }

    /// Columns `(first, second)` over rows `rows`.
    fn cols(self, m: &mut DenseMatrix, first: usize, second: usize, rows: std::ops::Range<usize>) {
        for k in rows {
            let mut a = m[(k, first)];
            let mut b = m[(k, second)];
            self.pair(&mut a, &mut b);
            m[(k, first)] = a;
            m[(k, second)] = b;
        }
    }
}

/// `P_Lᴴ M_A P_R = H_A`, `P_Lᴴ M_B P_R = H_B` with `H_A`, `H_B` upper triangular.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralizedSchur {
    pub h_a: DenseMatrix,
    pub h_b: DenseMatrix,
    pub p_l: DenseMatrix,
    pub p_r: DenseMatrix,
}

impl GeneralizedSchur {
    pub fn dim(&self) -> usize {
        self.h_a.n_rows()
    }

    /// Generalized eigenvalues as `(α_i, β_i) = ((H_A)_ii, (H_B)_ii)`.
    pub fn pairs(&self) -> Vec<(Complex64, Complex64)> {
        (0..self.dim()).map(|i| (self.h_a[(i, i)], self.h_b[(i, i)])).collect()
    }
}

struct Pencil {
    h: DenseMatrix,
    t: DenseMatrix,
    q: Option<DenseMatrix>,
    z: Option<DenseMatrix>,
}

impl Pencil {
    fn n(&self) -> usize {
        self.h.n_rows()
    }

    fn row_rot(&mut self, r: Rot, i: usize, j: usize, h_cols: std::ops::Range<usize>, t_cols: std::ops::Range<usize>) {
        r.rows(&mut self.h, i, j, h_cols);
        r.rows(&mut self.t, i, j, t_cols);
        if let Some(q) = self.q.as_mut() {
            let n = q.n_rows();
            r.adjoint().cols(q, i, j, 0..n);
        }
    }

    fn col_rot(&mut self, r: Rot, first: usize, second: usize, h_rows: std::ops::Range<usize>, t_rows: std::ops::Range<usize>) {
        r.cols(&mut self.h, first, second, h_rows);
        r.cols(&mut self.t, first, second, t_rows);
        if let Some(z) = self.z.as_mut() {
            let n = z.n_rows();
            r.cols(z, first, second, 0..n);
        }
    }
}

fn is_identity(b: &DenseMatrix) -> bool {
    (0..b.n_cols()).all(|j| {
        (0..b.n_rows()).all(|i| b[(i, j)] == if i == j { Complex64::new(1.0, 0.0) } else { ZERO })
    })
}

fn check_square_pair(a: &DenseMatrix, b: &DenseMatrix) -> Result<()> {
    if !a.is_square() || !b.is_square() || a.n_rows() != b.n_rows() {
        return Err(Error::Dimension(format!(
            "QZ needs square matrices of equal size, got {}x{} and {}x{}",
            a.n_rows(),
            a.n_cols(),
            b.n_rows(),
            b.n_cols()
        )));
    }
    Ok(())
}

fn reduce(a: &DenseMatrix, b: &DenseMatrix, accumulate: bool) -> Pencil {
    let n = a.n_rows();
    let mut p = Pencil {
        h: a.clone(),
        t: b.clone(),
        q: accumulate.then(|| DenseMatrix::identity(n)),
        z: accumulate.then(|| DenseMatrix::identity(n)),
    };
    if n <= 1 {
        return p;
    }
    if is_identity(b) {
        // A similarity transform keeps T = I, and Householder is cheaper.
        for k in 0..n.saturating_sub(2) {
            let h = Reflector::new(k + 1, &p.h.col(k)[k + 1..]);
            h.apply_left(&mut p.h, k..n);
            h.apply_right(&mut p.h, 0..n);
            for i in (k + 2)..n {
                p.h[(i, k)] = ZERO;
            }
            if let Some(q) = p.q.as_mut() {
                h.apply_right(q, 0..n);
            }
        }
        p.z.clone_from(&p.q);
        return p;
    }

    let refl = qr_in_place(&mut p.t);
    for h in &refl {
        h.apply_left(&mut p.h, 0..n);
        if let Some(q) = p.q.as_mut() {
            h.apply_right(q, 0..n);
        }
    }
    for j in 0..n.saturating_sub(2) {
        for i in ((j + 2)..n).rev() {
            let r = Rot::zeroing(p.h[(i - 1, j)], p.h[(i, j)]);
            p.row_rot(r, i - 1, i, j..n, i - 1..n);
            p.h[(i, j)] = ZERO;
            let r = Rot::zeroing(p.t[(i, i)], p.t[(i, i - 1)]);
            p.col_rot(r, i, i - 1, 0..n, 0..i + 1);
            p.t[(i, i - 1)] = ZERO;
        }
    }
    p
}

/// Unitary `Q`, `Z` with `Qᴴ A Z = H` upper Hessenberg and `Qᴴ B Z = T`
/// upper triangular. Returns `(H, T, Q, Z)`.
pub fn hessenberg_triangular(
    a: &DenseMatrix,
    b: &DenseMatrix,
) -> Result<(DenseMatrix, DenseMatrix, DenseMatrix, DenseMatrix)> {
    check_square_pair(a, b)?;
    let p = reduce(a, b, true);
    Ok((p.h, p.t, p.q.expect("accumulated"), p.z.expect("accumulated")))
}

/// Eigenvalues `λ` of the 2×2 upper-triangular-`T` pencil nearest `target`.
fn wilkinson_shift(h: [[Complex64; 2]; 2], t: [[Complex64; 2]; 2], target: Complex64) -> Complex64 {
    // det(H − λT) = t11 t22 λ² − (h11 t22 + h22 t11 − h21 t12) λ + (h11 h22 − h12 h21)
    let qa = t[0][0] * t[1][1];
    let qb = -(h[0][0] * t[1][1] + h[1][1] * t[0][0] - h[1][0] * t[0][1]);
    let qc = h[0][0] * h[1][1] - h[0][1] * h[1][0];
    if qa.norm() == 0.0 {
        return target;
    }
    let disc = (qb * qb - 4.0 * qa * qc).sqrt();
    let r1 = (-qb + disc) / (2.0 * qa);
    let r2 = (-qb - disc) / (2.0 * qa);
    let pick = if (r1 - target).norm() <= (r2 - target).norm() { r1 } else { r2 };
    if pick.re.is_finite() && pick.im.is_finite() {
        pick
    } else {
        target
    }
}

fn qz_iterate(p: &mut Pencil, full: bool) -> Result<()> {
    let n = p.n();
    if n <= 1 {
        return Ok(());
    }
    let t_norm = p.t.frobenius_norm();
    let h_norm = p.h.frobenius_norm();
    let t_tol = DEFLATION_TOL * t_norm;
    let h_floor = f64::MIN_POSITIVE.max(1e-300 * h_norm);
    let max_sweeps = SWEEPS_PER_DIM * n;
    let mut sweeps = 0usize;
    let mut since_deflation = 0usize;
    let mut exceptional = ZERO;
    let mut ihi = n - 1;

    while ihi > 0 {
        // Locate the unreduced block [lo, ihi].
        let mut lo = ihi;
        while lo > 0 {
            let sub = p.h[(lo, lo - 1)].norm();
            let scale = p.h[(lo - 1, lo - 1)].norm() + p.h[(lo, lo)].norm();
            if sub <= DEFLATION_TOL * scale || sub <= h_floor {
                p.h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == ihi {
            ihi -= 1;
            since_deflation = 0;
            exceptional = ZERO;
            continue;
        }

        let (row_lo, col_hi) = if full { (0, n) } else { (lo, ihi + 1) };

        // A negligible T diagonal means an infinite eigenvalue; push it out.
        if let Some(j) = (lo..=ihi).find(|&j| p.t[(j, j)].norm() <= t_tol) {
            p.t[(j, j)] = ZERO;
            if j == lo {
                let r = Rot::zeroing(p.h[(lo, lo)], p.h[(lo + 1, lo)]);
                p.row_rot(r, lo, lo + 1, lo..col_hi, lo..col_hi);
                p.h[(lo + 1, lo)] = ZERO;
                continue;
            }
            for jj in j..ihi {
                let r = Rot::zeroing(p.t[(jj, jj + 1)], p.t[(jj + 1, jj + 1)]);
                p.row_rot(r, jj, jj + 1, jj - 1..col_hi, jj..col_hi);
                p.t[(jj + 1, jj + 1)] = ZERO;
                if jj > lo {
                    let r = Rot::zeroing(p.h[(jj + 1, jj)], p.h[(jj + 1, jj - 1)]);
                    p.col_rot(r, jj, jj - 1, row_lo..jj + 2, row_lo..jj + 1);
                    p.h[(jj + 1, jj - 1)] = ZERO;
                }
            }
            let r = Rot::zeroing(p.h[(ihi, ihi)], p.h[(ihi, ihi - 1)]);
            p.col_rot(r, ihi, ihi - 1, row_lo..ihi + 1, row_lo..ihi + 1);
            p.h[(ihi, ihi - 1)] = ZERO;
            continue;
        }

        sweeps += 1;
        since_deflation += 1;
        if sweeps > max_sweeps {
            return Err(Error::QzNoConvergence { sweeps: max_sweeps });
        }
        let target = p.h[(ihi, ihi)] / p.t[(ihi, ihi)];
        let shift = if since_deflation % 10 == 0 {
            exceptional += p.h[(ihi, ihi - 1)] / p.t[(ihi - 1, ihi - 1)];
            target + exceptional
        } else {
            let m = ihi - 1;
            wilkinson_shift(
                [[p.h[(m, m)], p.h[(m, ihi)]], [p.h[(ihi, m)], p.h[(ihi, ihi)]]],
                [[p.t[(m, m)], p.t[(m, ihi)]], [ZERO, p.t[(ihi, ihi)]]],
                target,
            )
        };

        // Single-shift sweep over [lo, ihi].
        for j in lo..ihi {
            let r = if j == lo {
                Rot::zeroing(p.h[(lo, lo)] - shift * p.t[(lo, lo)], p.h[(lo + 1, lo)])
            } else {
                Rot::zeroing(p.h[(j, j - 1)], p.h[(j + 1, j - 1)])
            };
            let start = if j == lo { lo } else { j - 1 };
            p.row_rot(r, j, j + 1, start..col_hi, j..col_hi);
            if j > lo {
                p.h[(j + 1, j - 1)] = ZERO;
            }
            let r = Rot::zeroing(p.t[(j + 1, j + 1)], p.t[(j + 1, j)]);
            let h_end = (j + 3).min(ihi + 1);
            p.col_rot(r, j + 1, j, row_lo..h_end, row_lo..j + 2);
            p.t[(j + 1, j)] = ZERO;
        }
    }
    Ok(())
}

/// Generalized Schur form of `(A, B)` by Hessenberg–triangular reduction and
/// single-shift complex QZ.
pub fn qz(a: &DenseMatrix, b: &DenseMatrix) -> Result<GeneralizedSchur> {
    check_square_pair(a, b)?;
    let mut p = reduce(a, b, true);
    qz_iterate(&mut p, true)?;
    Ok(GeneralizedSchur {
        h_a: p.h,
        h_b: p.t,
        p_l: p.q.expect("accumulated"),
        p_r: p.z.expect("accumulated"),
    })
}

/// Eigenvalue pairs `(α_i, β_i)` only; transforms are not accumulated and
/// updates are restricted to the active block.
pub fn qz_eigenvalues(a: &DenseMatrix, b: &DenseMatrix) -> Result<Vec<(Complex64, Complex64)>> {
    check_square_pair(a, b)?;
    let mut p = reduce(a, b, false);
    qz_iterate(&mut p, false)?;
    Ok((0..p.n()).map(|i| (p.h[(i, i)], p.t[(i, i)])).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{complex_normal, seeded};

    fn random(n: usize, seed: u64) -> DenseMatrix {
        let mut rng = seeded(seed);
        DenseMatrix::from_fn(n, n, |_, _| complex_normal(&mut rng))
    }

    fn reconstruction(q: &DenseMatrix, m: &DenseMatrix, z: &DenseMatrix, target: &DenseMatrix) -> f64 {
        let lhs = q.adjoint_mul(&m.matmul(z).unwrap()).unwrap();
        lhs.combine(Complex64::new(1.0, 0.0), target, Complex64::new(-1.0, 0.0))
            .unwrap()
            .frobenius_norm()
    }

    #[test]
    fn rotation_zeroes_second_entry() {
        let f = Complex64::new(0.3, -1.2);
        let g = Complex64::new(-2.0, 0.7);
        let r = Rot::zeroing(f, g);
        let (mut x, mut y) = (f, g);
        r.pair(&mut x, &mut y);
        assert!(y.norm() < 1e-15);
        assert!((x.norm() - f.norm().hypot(g.norm())).abs() < 1e-14);
    }

    #[test]
    fn hessenberg_triangular_reconstructs() {
        for (n, seed) in [(1, 1), (2, 2), (8, 3), (15, 4)] {
            let (a, b) = (random(n, seed), random(n, seed + 100));
            let (h, t, q, z) = hessenberg_triangular(&a, &b).unwrap();
            assert!(reconstruction(&q, &a, &z, &h) < 1e-12 * a.frobenius_norm());
            assert!(reconstruction(&q, &b, &z, &t) < 1e-12 * b.frobenius_norm());
            assert!(t.strict_lower_norm() == 0.0);
            for j in 0..n {
                for i in (j + 2)..n {
                    assert_eq!(h[(i, j)], ZERO);
                }
            }
        }
    }

    #[test]
    fn triangular_input_needs_no_transform() {
        let mut a = DenseMatrix::zeros(3, 3);
        let mut b = DenseMatrix::zeros(3, 3);
        for j in 0..3 {
            for i in 0..=j.min(2) {
                a[(i, j)] = Complex64::new(1.0 + i as f64, j as f64);
                b[(i, j)] = Complex64::new(2.0 + j as f64, 0.5);
            }
        }
        let (_, _, q, z) = hessenberg_triangular(&a, &b).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((q[(i, j)].norm() - expect).abs() < 1e-14);
                assert!((z[(i, j)].norm() - expect).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn diagonal_pencil_eigenvalues() {
        let a = DenseMatrix::from_diagonal(&[Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)]);
        let b = DenseMatrix::identity(2);
        let s = qz(&a, &b).unwrap();
        let mut l: Vec<f64> = s.pairs().iter().map(|(a, b)| (a / b).re).collect();
        l.sort_by(f64::total_cmp);
        assert_eq!(l, [1.0, 2.0]);
    }

    #[test]
    fn defective_block_has_double_zero() {
        let mut a = DenseMatrix::zeros(2, 2);
        a[(0, 1)] = Complex64::new(1.0, 0.0);
        let s = qz(&a, &DenseMatrix::identity(2)).unwrap();
        for (al, be) in s.pairs() {
            assert!((al / be).norm() < 1e-7);
        }
    }

    #[test]
    fn schur_form_bounds_on_random_pencils() {
        for seed in 0..20 {
            let n = 3 + (seed as usize * 7) % 25;
            let (a, b) = (random(n, seed), random(n, seed + 1000));
            let s = qz(&a, &b).unwrap();
            assert!(reconstruction(&s.p_l, &a, &s.p_r, &s.h_a) <= 1e-10 * a.frobenius_norm());
            assert!(reconstruction(&s.p_l, &b, &s.p_r, &s.h_b) <= 1e-10 * b.frobenius_norm());
            assert!(s.h_a.strict_lower_norm() <= 1e-12 * s.h_a.frobenius_norm());
            assert!(s.h_b.strict_lower_norm() <= 1e-12 * s.h_b.frobenius_norm());
            let fast = qz_eigenvalues(&a, &b).unwrap();
            let mut x: Vec<Complex64> = s.pairs().iter().map(|(a, b)| a / b).collect();
            let mut y: Vec<Complex64> = fast.iter().map(|(a, b)| a / b).collect();
            let key = |z: &Complex64| (z.re, z.im);
            x.sort_by(|p, q| key(p).partial_cmp(&key(q)).unwrap());
            y.sort_by(|p, q| key(p).partial_cmp(&key(q)).unwrap());
            for (p, q) in x.iter().zip(&y) {
                assert!((p - q).norm() < 1e-8 * (1.0 + p.norm()), "seed {seed}");
            }
        }
    }

    #[test]
    fn singular_b_gives_infinite_eigenvalues() {
        let a = random(6, 7);
        let mut b = random(6, 8);
        for i in 0..6 {
            b[(i, 0)] = ZERO;
            b[(i, 3)] = ZERO;
        }
        let s = qz(&a, &b).unwrap();
        let infinite = s.pairs().iter().filter(|(_, be)| be.norm() < 1e-12 * b.frobenius_norm()).count();
        assert_eq!(infinite, 2);
        assert!(reconstruction(&s.p_l, &a, &s.p_r, &s.h_a) <= 1e-10 * a.frobenius_norm());
        assert!(s.h_a.strict_lower_norm() <= 1e-12 * s.h_a.frobenius_norm());
    }
}
