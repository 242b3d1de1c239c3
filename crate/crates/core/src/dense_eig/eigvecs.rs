use num_complex::Complex64;

use super::qz::GeneralizedSchur;
use crate::dense::{norm2, DenseMatrix};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Eigenvectors of the triangular pencil `(H_A, H_B)`.
#[derive(Debug, Clone)]
pub struct TriangularEigvecs {
    /// Column `i` solves `(β_i H_A − α_i H_B) v = 0`, unit 2-norm.
    pub right: DenseMatrix,
    /// Column `i` solves `uᴴ (β_i H_A − α_i H_B) = 0`, unit 2-norm.
    pub left: DenseMatrix,
    /// Indices whose back-substitution hit a near-zero divisor.
    pub perturbed: Vec<usize>,
}

fn safe_divisor(d: Complex64, floor: f64, hit: &mut bool) -> Complex64 {
    if d.norm() >= floor {
        d
    } else {
        *hit = true;
        if d == ZERO {
            Complex64::new(floor, 0.0)
        } else {
            d / d.norm() * floor
        }
    }
}

fn normalize(v: &mut [Complex64]) {
    let n = norm2(v);
    if n > 0.0 && n.is_finite() {
        v.iter_mut().for_each(|x| *x /= n);
    }
}

pub fn triangular_eigvecs(schur: &GeneralizedSchur) -> TriangularEigvecs {
    let (ha, hb) = (&schur.h_a, &schur.h_b);
    let n = schur.dim();
    let mut right = DenseMatrix::zeros(n, n);
    let mut left = DenseMatrix::zeros(n, n);
    let mut perturbed = Vec::new();
    let (na, nb) = (ha.frobenius_norm(), hb.frobenius_norm());

    for i in 0..n {
        let (mut alpha, mut beta) = (ha[(i, i)], hb[(i, i)]);
        // Scale the pair so both terms of β H_A − α H_B are O(1).
        let s = (alpha.norm() / na.max(f64::MIN_POSITIVE)).max(beta.norm() / nb.max(f64::MIN_POSITIVE));
        if s > 0.0 {
            alpha /= s;
            beta /= s;
        }
        let m = |r: usize, c: usize| beta * ha[(r, c)] - alpha * hb[(r, c)];
        let floor = 1e-14 * (beta.norm() * na + alpha.norm() * nb).max(f64::MIN_POSITIVE);
        let mut hit = false;

        let v = right.col_mut(i);
        v[i] = Complex64::new(1.0, 0.0);
        for j in (0..i).rev() {
            let acc: Complex64 = ((j + 1)..=i).map(|k| m(j, k) * v[k]).sum();
            v[j] = -acc / safe_divisor(m(j, j), floor, &mut hit);
        }
        normalize(v);

        // Conjugated left vector w = ū solves wᵀ M = 0, i.e. a forward sweep.
        let mut w = vec![ZERO; n];
        w[i] = Complex64::new(1.0, 0.0);
        for j in (i + 1)..n {
            let acc: Complex64 = (i..j).map(|k| w[k] * m(k, j)).sum();
            w[j] = -acc / safe_divisor(m(j, j), floor, &mut hit);
        }
        let u = left.col_mut(i);
        for (uj, wj) in u.iter_mut().zip(&w) {
            *uj = wj.conj();
        }
        normalize(u);

        if hit {
            perturbed.push(i);
        }
    }
    TriangularEigvecs { right, left, perturbed }
}
