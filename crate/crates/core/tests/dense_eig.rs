use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rfeig::dense::{DenseLu, DenseMatrix};
use rfeig::dense_eig::{
    hessenberg_triangular, orth, orthogonality_error, qz, reduced_solve, triangular_eigvecs, GeneralizedSchur,
    RANK_TOL,
};
use rfeig::rng::{complex_normal, seeded};
use rfeig::Error;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random(n_rows: usize, n_cols: usize, seed: u64) -> DenseMatrix {
    let mut rng = seeded(seed);
    DenseMatrix::from_fn(n_rows, n_cols, |_, _| complex_normal(&mut rng))
}

fn diff_norm(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    a.combine(c(1.0, 0.0), b, c(-1.0, 0.0)).unwrap().frobenius_norm()
}

fn unitary_error(q: &DenseMatrix) -> f64 {
    diff_norm(&q.adjoint_mul(q).unwrap(), &DenseMatrix::identity(q.n_cols()))
}

/// Eigenvalues of `B⁻¹A` from nalgebra's complex Schur form.
fn oracle(a: &DenseMatrix, b: &DenseMatrix) -> Vec<Complex64> {
    let m = DenseLu::factor(b).unwrap().solve_block(a).unwrap();
    let n = m.n_rows();
    DMatrix::from_fn(n, n, |i, j| m[(i, j)])
        .schur()
        .eigenvalues()
        .unwrap()
        .iter()
        .copied()
        .collect()
}

fn assert_matched(mut got: Vec<Complex64>, want: &[Complex64], tol: f64) {
    assert_eq!(got.len(), want.len());
    for &w in want {
        let (k, d) = got
            .iter()
            .map(|g| (g - w).norm())
            .enumerate()
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        assert!(d <= tol * w.norm().max(1.0), "{w}: nearest at distance {d}");
        got.swap_remove(k);
    }
}

fn assert_schur(a: &DenseMatrix, b: &DenseMatrix, s: &GeneralizedSchur) {
    let ra = s.p_l.adjoint_mul(&a.matmul(&s.p_r).unwrap()).unwrap();
    let rb = s.p_l.adjoint_mul(&b.matmul(&s.p_r).unwrap()).unwrap();
    assert!(diff_norm(&ra, &s.h_a) <= 1e-10 * a.frobenius_norm());
    assert!(diff_norm(&rb, &s.h_b) <= 1e-10 * b.frobenius_norm().max(1e-300));
    assert!(s.h_a.strict_lower_norm() <= 1e-12 * s.h_a.frobenius_norm());
    assert!(s.h_b.strict_lower_norm() <= 1e-12 * s.h_b.frobenius_norm().max(1e-300));
    assert!(unitary_error(&s.p_l) < 1e-10 && unitary_error(&s.p_r) < 1e-10);
}

#[test]
fn orth_examples() {
    let i = orth(&DenseMatrix::identity(4), RANK_TOL).unwrap();
    for j in 0..4 {
        assert!((i[(j, j)].norm() - 1.0).abs() < 1e-15);
    }
    let v: Vec<Complex64> = (0..6).map(|k| c(k as f64, 1.0)).collect();
    let w: Vec<Complex64> = v.iter().map(|x| x * 2.0).collect();
    assert_eq!(orth(&DenseMatrix::from_columns(6, &[v, w]).unwrap(), RANK_TOL).unwrap().n_cols(), 1);
    assert!(matches!(orth(&DenseMatrix::zeros(3, 2), RANK_TOL), Err(Error::ZeroInput)));
}

#[test]
fn orth_spans_the_input() {
    let y = random(50, 10, 1);
    let v = orth(&y, RANK_TOL).unwrap();
    assert_eq!(v.n_cols(), 10);
    assert!(orthogonality_error(&v) < 1e-12);
    let proj = v.matmul(&v.adjoint_mul(&y).unwrap()).unwrap();
    assert!(diff_norm(&proj, &y) < 1e-10 * y.frobenius_norm());
}

#[test]
fn hessenberg_triangular_reduction() {
    let (a, b) = (random(8, 8, 2), random(8, 8, 3));
    let (h, t, q, z) = hessenberg_triangular(&a, &b).unwrap();
    for j in 0..8 {
        for i in j + 2..8 {
            assert!(h[(i, j)].norm() < 1e-12 * a.frobenius_norm());
        }
    }
    assert!(t.strict_lower_norm() < 1e-12 * b.frobenius_norm());
    let qaz = q.adjoint_mul(&a.matmul(&z).unwrap()).unwrap();
    let qbz = q.adjoint_mul(&b.matmul(&z).unwrap()).unwrap();
    assert!(diff_norm(&qaz, &h) < 1e-10 * a.frobenius_norm());
    assert!(diff_norm(&qbz, &t) < 1e-10 * b.frobenius_norm());
    assert!(unitary_error(&q) < 1e-10 && unitary_error(&z) < 1e-10);

    let one = DenseMatrix::from_diagonal(&[c(2.0, 1.0)]);
    let (h, t, q, z) = hessenberg_triangular(&one, &DenseMatrix::identity(1)).unwrap();
    assert_eq!((h, t), (one, DenseMatrix::identity(1)));
    assert!((q[(0, 0)].norm() - 1.0).abs() < 1e-15 && (z[(0, 0)].norm() - 1.0).abs() < 1e-15);
}

#[test]
fn qz_small_examples() {
    let s = qz(&DenseMatrix::from_diagonal(&[c(1.0, 0.0), c(2.0, 0.0)]), &DenseMatrix::identity(2)).unwrap();
    let mut ev: Vec<f64> = s.pairs().iter().map(|(a, b)| (a / b).re).collect();
    ev.sort_by(f64::total_cmp);
    assert!((ev[0] - 1.0).abs() < 1e-14 && (ev[1] - 2.0).abs() < 1e-14);

    let nil = DenseMatrix::from_col_major(2, 2, vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
    let s = qz(&nil, &DenseMatrix::identity(2)).unwrap();
    for (a, b) in s.pairs() {
        assert!((a / b).norm() < 1e-8);
    }
}

#[test]
fn qz_matches_oracle_on_random_pencils() {
    for seed in 0..100u64 {
        let n = 1 + (seed as usize * 7) % 30;
        let (a, b) = (random(n, n, 2 * seed), random(n, n, 2 * seed + 1));
        let s = qz(&a, &b).unwrap();
        assert_schur(&a, &b, &s);
        let got: Vec<Complex64> = s.pairs().iter().map(|(x, y)| x / y).collect();
        assert_matched(got, &oracle(&a, &b), 1e-8);
    }
}

#[test]
fn standard_problem_matches_oracle() {
    let a = random(6, 6, 40);
    let s = qz(&a, &DenseMatrix::identity(6)).unwrap();
    let got: Vec<Complex64> = s.pairs().iter().map(|(x, y)| x / y).collect();
    assert_matched(got, &oracle(&a, &DenseMatrix::identity(6)), 1e-8);
}

#[test]
fn triangular_eigenvectors() {
    let d = DenseMatrix::from_diagonal(&[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 1.0)]);
    let schur = GeneralizedSchur {
        h_a: d.clone(),
        h_b: DenseMatrix::identity(3),
        p_l: DenseMatrix::identity(3),
        p_r: DenseMatrix::identity(3),
    };
    let v = triangular_eigvecs(&schur);
    for i in 0..3 {
        assert!((v.right[(i, i)].norm() - 1.0).abs() < 1e-15);
        assert!((v.left[(i, i)].norm() - 1.0).abs() < 1e-15);
    }

    // [[1, 1], [0, 3]] with B = I: right vector of λ = 3 is (1, 2)/√5.
    let h = DenseMatrix::from_col_major(2, 2, vec![c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(3.0, 0.0)]).unwrap();
    let schur = GeneralizedSchur {
        h_a: h,
        h_b: DenseMatrix::identity(2),
        p_l: DenseMatrix::identity(2),
        p_r: DenseMatrix::identity(2),
    };
    let v = triangular_eigvecs(&schur);
    let x = v.right.col(1);
    let ratio = x[1] / x[0];
    assert!((ratio - c(2.0, 0.0)).norm() < 1e-14);

    let (a, b) = (random(6, 6, 50), random(6, 6, 51));
    let s = qz(&a, &b).unwrap();
    let v = triangular_eigvecs(&s);
    for (i, (al, be)) in s.pairs().into_iter().enumerate() {
        let lam = al / be;
        let r = s.h_a.combine(c(1.0, 0.0), &s.h_b, -lam).unwrap();
        let res = r.matvec(v.right.col(i)).unwrap();
        assert!(res.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() < 1e-10 * s.h_a.frobenius_norm().max(1.0) * (1.0 + lam.norm()));
    }
}

#[test]
fn reduced_solve_is_unitarily_invariant() {
    let (a, b) = (random(10, 10, 60), random(10, 10, 61));
    let r = reduced_solve(&a, &b).unwrap();
    let ev: Vec<Complex64> = r.eigenvalues.iter().map(|e| e.unwrap()).collect();
    assert_matched(ev.clone(), &oracle(&a, &b), 1e-8);

    let u = orth(&random(10, 10, 62), RANK_TOL).unwrap();
    let conj = |m: &DenseMatrix| u.adjoint_mul(&m.matmul(&u).unwrap()).unwrap();
    let r2 = reduced_solve(&conj(&a), &conj(&b)).unwrap();
    assert_matched(r2.eigenvalues.iter().map(|e| e.unwrap()).collect(), &ev, 1e-10);

    let d = reduced_solve(&DenseMatrix::from_diagonal(&[c(4.0, 0.0), c(-1.0, 2.0)]), &DenseMatrix::identity(2)).unwrap();
    assert_matched(d.eigenvalues.iter().map(|e| e.unwrap()).collect(), &[c(4.0, 0.0), c(-1.0, 2.0)], 1e-14);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn qz_invariants(seed in 0u64..100_000, n in 1usize..=30) {
        let (a, b) = (random(n, n, seed), random(n, n, seed ^ 0x5555));
        let s = qz(&a, &b).unwrap();
        assert_schur(&a, &b, &s);
    }

    #[test]
    fn orth_is_orthonormal(seed in 0u64..100_000, rows in 5usize..60, cols in 1usize..5) {
        let v = orth(&random(rows, cols, seed), RANK_TOL).unwrap();
        prop_assert!(v.n_cols() == cols.min(rows));
        prop_assert!(orthogonality_error(&v) < 1e-12);
    }
}
