use num_complex::Complex64;

use super::householder::{form_q, qr_in_place, Reflector};
use crate::dense::{norm2, DenseMatrix};
use crate::error::{Error, Result};

/// Default relative rank threshold for [`orth`].
pub const RANK_TOL: f64 = 1e-12;

/// Orthonormal basis of the numerical range of `y`.
///
/// Column-pivoted Householder QR; columns are kept while
/// `|r_jj| > rank_tol · |r_11|`.
pub fn orth(y: &DenseMatrix, rank_tol: f64) -> Result<DenseMatrix> {
    let (m, n) = (y.n_rows(), y.n_cols());
    let mut a = y.clone();
    let mut norms: Vec<f64> = a.columns().map(norm2).collect();
    let first = norms.iter().copied().fold(0.0, f64::max);
    if first == 0.0 || !first.is_finite() {
        return Err(Error::ZeroInput);
    }
    let mut reflectors: Vec<Reflector> = Vec::new();
    let mut r11 = 0.0;
    for k in 0..m.min(n) {
        let (p, pmax) = norms[k..]
            .iter()
            .enumerate()
            .fold((k, -1.0), |best, (i, &v)| if v > best.1 { (k + i, v) } else { best });
        if k > 0 && pmax <= rank_tol * r11 {
            break;
        }
        if p != k {
            for i in 0..m {
                let t = a[(i, k)];
                a[(i, k)] = a[(i, p)];
                a[(i, p)] = t;
            }
            norms.swap(k, p);
        }
        let h = Reflector::new(k, &a.col(k)[k..]);
        h.apply_left(&mut a, k..n);
        let rkk = h.alpha.norm();
        if k == 0 {
            r11 = rkk;
        } else if rkk <= rank_tol * r11 {
            break;
        }
        reflectors.push(h);
        // Recompute the trailing norms exactly; the blocks are thin.
        for j in (k + 1)..n {
            norms[j] = norm2(&a.col(j)[k + 1..]);
        }
    }
    Ok(form_q(&reflectors, m, reflectors.len()))
}

/// Thin QR factor `Q` of a full-rank `m × n` block, `m ≥ n`, without any
/// rank truncation.
pub fn thin_q(y: &DenseMatrix) -> Result<DenseMatrix> {
    if y.n_rows() < y.n_cols() {
        return Err(Error::Dimension(format!(
            "thin QR needs at least as many rows as columns, got {}x{}",
            y.n_rows(),
            y.n_cols()
        )));
    }
    let mut a = y.clone();
    let refl = qr_in_place(&mut a);
    Ok(form_q(&refl, y.n_rows(), y.n_cols()))
}

/// `max |VᴴV − I|`.
pub fn orthogonality_error(v: &DenseMatrix) -> f64 {
    let g = v.adjoint_mul(v).expect("square Gram matrix");
    let mut e: f64 = 0.0;
    for j in 0..g.n_cols() {
        for i in 0..g.n_rows() {
            let target = if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
            e = e.max((g[(i, j)] - target).norm());
        }
    }
    e
}
