use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;
use proptest::prelude::*;
use rfeig::dense::{norm2, DenseMatrix};
use rfeig::dense_eig::orthogonality_error;
use rfeig::factorization::build_inner_operator;
use rfeig::msgmres::{combine_solutions, solve_all_shifts, DiagonalOperator, KrylovWorkspace, LinearOperator};
use rfeig::pencil::{gen_spectrum_pencil, ComplexSparseMatrix, DiskRegion, MatrixPencil};
use rfeig::rational::{composite_coeffs, eval_compact, eval_composite, trapezoid_rule};
use rfeig::rng::{complex_normal, seeded};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_vec(n: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = seeded(seed);
    (0..n).map(|_| complex_normal(&mut rng)).collect()
}

fn true_residual(op: &dyn LinearOperator, s: Complex64, x: &[Complex64], b: &[Complex64]) -> f64 {
    let gx = op.apply(x);
    let r: Vec<Complex64> = gx.iter().zip(x).zip(b).map(|((g, x), b)| g - s * x - b).collect();
    norm2(&r)
}

/// Filter values of a spread-out spectrum, as seen by the outer solve.
fn filter_diagonal(n: usize, k1: usize) -> Vec<Complex64> {
    let region = DiskRegion::unit();
    (0..n)
        .map(|i| {
            let z = Complex64::from_polar(0.2 + 2.0 * i as f64 / n as f64, 2.4 * i as f64);
            eval_compact(&region, k1, z).unwrap()
        })
        .collect()
}

fn arnoldi_residual(op: &dyn LinearOperator, ws: &KrylovWorkspace) -> f64 {
    let n = ws.size();
    let v = ws.basis();
    let h = ws.hessenberg();
    let mut worst: f64 = 0.0;
    for j in 0..n {
        let gv = op.apply(ws.basis_vector(j));
        let mut vh = vec![c(0.0, 0.0); op.dim()];
        for i in 0..v.n_cols().min(j + 2) {
            for (t, &x) in vh.iter_mut().zip(v.col(i)) {
                *t += x * h[(i, j)];
            }
        }
        let d: Vec<Complex64> = gv.iter().zip(&vh).map(|(a, b)| a - b).collect();
        worst = worst.max(norm2(&d));
    }
    worst / h.frobenius_norm()
}

#[test]
fn identity_breaks_down_after_one_step() {
    let op = DiagonalOperator(vec![c(1.0, 0.0); 5]);
    let mut ws = KrylovWorkspace::new(&random_vec(5, 1)).unwrap();
    assert_eq!(ws.arnoldi_extend(&op, 10), 1);
    assert!(ws.breakdown());
    let h = ws.hessenberg();
    assert!((h[(0, 0)] - c(1.0, 0.0)).norm() < 1e-14);
}

#[test]
fn breakdown_at_minimal_polynomial_degree() {
    let d = [c(1.0, 0.0), c(2.0, 1.0), c(-1.0, 0.5), c(2.0, 1.0), c(1.0, 0.0), c(0.0, 3.0)];
    let op = DiagonalOperator(d.to_vec());
    let mut ws = KrylovWorkspace::new(&random_vec(6, 2)).unwrap();
    assert_eq!(ws.arnoldi_extend(&op, 20), 4);
    assert!(ws.breakdown());
}

#[test]
fn dense_arnoldi_relation_and_orthogonality() {
    let mut rng = seeded(3);
    let m = DenseMatrix::from_fn(30, 30, |_, _| complex_normal(&mut rng));
    let mut ws = KrylovWorkspace::new(&random_vec(30, 4)).unwrap();
    ws.arnoldi_extend(&m, 25);
    assert!(arnoldi_residual(&m, &ws) < 1e-10);
    assert!(orthogonality_error(&ws.basis()) < 1e-10);
}

#[test]
fn long_basis_stays_orthogonal() {
    let op = DiagonalOperator(filter_diagonal(400, 8));
    let mut ws = KrylovWorkspace::new(&random_vec(400, 5)).unwrap();
    ws.arnoldi_extend(&op, 200);
    assert_eq!(ws.size(), 200);
    assert!(orthogonality_error(&ws.basis()) < 1e-10);
    assert!(arnoldi_residual(&op, &ws) < 1e-9);
}

#[test]
fn scaled_identity_solves_in_one_step() {
    let op = DiagonalOperator(vec![c(2.0, 0.0); 4]);
    let b = random_vec(4, 6);
    let (res, ws) = solve_all_shifts(&op, &b, &[c(0.0, 0.0)], 1e-9, 200).unwrap();
    assert_eq!(ws.op_applications(), 1);
    for (x, b) in res.solutions[0].iter().zip(&b) {
        assert!((x - b / 2.0).norm() < 1e-14);
    }
}

#[test]
fn diagonal_closed_form_for_composite_shifts() {
    let g = filter_diagonal(300, 8);
    let op = DiagonalOperator(g.clone());
    let b = random_vec(300, 7);
    let coeffs = composite_coeffs(8).unwrap();
    let (res, _) = solve_all_shifts(&op, &b, &coeffs.shifts, 1e-9, 200).unwrap();
    assert!(res.all_converged());
    for (j, &s) in coeffs.shifts.iter().enumerate() {
        let x = &res.solutions[j];
        let err: f64 = x.iter().zip(&g).zip(&b).map(|((x, g), b)| (x - b / (g - s)).norm_sqr()).sum::<f64>().sqrt();
        let scale: f64 = g.iter().zip(&b).map(|(g, b)| (b / (g - s)).norm_sqr()).sum::<f64>().sqrt();
        assert!(err <= 1e-8 * scale);
        let tr = true_residual(&op, s, x, &b);
        assert!((tr - res.residual_norms[j]).abs() <= 1e-8 * norm2(&b));
    }
}

#[test]
fn toy_inner_operator_converges_quickly() {
    let outside = Complex64::from_polar(2f64.powf(0.25), FRAC_PI_4);
    let toy = gen_spectrum_pencil(&[c(0.0, 0.0), c(0.75, 0.0)], &[outside], 1).unwrap();
    let g = build_inner_operator(&toy.pencil, &trapezoid_rule(&DiskRegion::unit(), 8).unwrap()).unwrap();
    let b = random_vec(3, 8);
    let (res, _) = solve_all_shifts(&g, &b, &composite_coeffs(8).unwrap().shifts, 1e-9, 200).unwrap();
    assert!(res.all_converged());
    assert!(res.iterations.iter().all(|&n| n < 100));
}

#[test]
fn resolving_known_shifts_costs_nothing() {
    let op = DiagonalOperator(filter_diagonal(200, 4));
    let b = random_vec(200, 9);
    let shifts = composite_coeffs(8).unwrap().shifts;
    let (first, mut ws) = solve_all_shifts(&op, &b, &shifts, 1e-9, 200).unwrap();
    let again = ws.extend_shifts(&op, &shifts, 1e-9, 200);
    assert_eq!(again.new_applications, 0);
    assert_eq!(again.solutions, first.solutions);
}

#[test]
fn doubling_reuses_the_basis() {
    let op = DiagonalOperator(filter_diagonal(300, 8));
    let b = random_vec(300, 10);
    let s8 = composite_coeffs(8).unwrap().shifts;
    let s16 = composite_coeffs(16).unwrap().shifts;
    let s32 = composite_coeffs(32).unwrap().shifts;

    let (r8, mut ws) = solve_all_shifts(&op, &b, &s8, 1e-9, 200).unwrap();
    let r16 = ws.extend_shifts(&op, &s16, 1e-9, 200);
    let r8_again = ws.extend_shifts(&op, &s8, 1e-9, 200);
    assert_eq!(r8.solutions, r8_again.solutions);
    let (scratch16, _) = solve_all_shifts(&op, &b, &s16, 1e-9, 200).unwrap();
    assert_eq!(r16.solutions, scratch16.solutions);

    ws.extend_shifts(&op, &s32, 1e-9, 200);
    let (_, direct) = solve_all_shifts(&op, &b, &s32, 1e-9, 200).unwrap();
    assert!(ws.op_applications() as f64 <= 1.1 * direct.op_applications() as f64);
}

#[test]
fn extending_keeps_stored_vectors() {
    let op = DiagonalOperator(filter_diagonal(100, 4));
    let b = random_vec(100, 11);
    let (_, mut ws) = solve_all_shifts(&op, &b, &composite_coeffs(2).unwrap().shifts, 1e-6, 200).unwrap();
    let before = ws.basis();
    ws.extend_shifts(&op, &composite_coeffs(16).unwrap().shifts, 1e-12, 200);
    let after = ws.basis();
    assert!(after.n_cols() >= before.n_cols());
    for j in 0..before.n_cols() {
        assert_eq!(before.col(j), after.col(j));
    }
}

#[test]
fn combine_degenerate_and_scalar_cases() {
    let g = filter_diagonal(50, 2);
    let op = DiagonalOperator(g.clone());
    let y = random_vec(50, 12);
    let gy = op.apply(&y);

    let k1 = composite_coeffs(1).unwrap();
    let (res, _) = solve_all_shifts(&op, &gy, &k1.shifts, 1e-12, 200).unwrap();
    assert_eq!(combine_solutions(&res, &k1, &gy).unwrap(), gy);

    let region = DiskRegion::unit();
    let z: Vec<Complex64> = (0..50)
        .map(|i| Complex64::from_polar(0.2 + 2.0 * i as f64 / 50.0, 2.4 * i as f64))
        .collect();
    for k2 in [2, 3, 4, 5] {
        let cc = composite_coeffs(k2).unwrap();
        let (res, _) = solve_all_shifts(&op, &gy, &cc.shifts, 1e-13, 200).unwrap();
        let u = combine_solutions(&res, &cc, &gy).unwrap();
        for i in 0..50 {
            let want = eval_composite(&region, 2, k2, z[i]).unwrap() * y[i];
            let compact = eval_compact(&region, 2 * k2, z[i]).unwrap() * y[i];
            assert!((u[i] - want).norm() <= 1e-8 * (1.0 + want.norm()), "k2={k2} i={i}");
            assert!((u[i] - compact).norm() <= 1e-8 * (1.0 + compact.norm()));
        }
    }

    let (res, _) = solve_all_shifts(&op, &gy, &composite_coeffs(2).unwrap().shifts, 1e-9, 200).unwrap();
    assert!(combine_solutions(&res, &composite_coeffs(4).unwrap(), &gy).is_err());
}

#[test]
fn zero_rhs_is_rejected() {
    let op = DiagonalOperator(vec![c(1.0, 0.0); 3]);
    assert!(solve_all_shifts(&op, &[c(0.0, 0.0); 3], &[c(0.5, 0.0)], 1e-9, 10).is_err());
}

#[test]
fn inner_operator_as_linear_operator() {
    let p = MatrixPencil::new(
        ComplexSparseMatrix::from_diagonal(&[c(0.1, 0.0), c(0.9, 0.2), c(3.0, 0.0)]),
        ComplexSparseMatrix::identity(3),
    )
    .unwrap();
    let g = build_inner_operator(&p, &trapezoid_rule(&DiskRegion::unit(), 4).unwrap()).unwrap();
    let x = random_vec(3, 13);
    assert_eq!(LinearOperator::apply(&g, &x), g.apply_vec(&x).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn shifted_arnoldi_relation(seed in 0u64..1000, sr in -1.0f64..1.0, si in -1.0f64..1.0) {
        let op = DiagonalOperator(random_vec(60, seed));
        let mut ws = KrylovWorkspace::new(&random_vec(60, seed + 1)).unwrap();
        ws.arnoldi_extend(&op, 30);
        let n = ws.size();
        let s = c(sr, si);
        let v = ws.basis();
        let h = ws.hessenberg();
        let mut worst: f64 = 0.0;
        for j in 0..n {
            let mut lhs: Vec<Complex64> = op.apply(v.col(j));
            lhs.iter_mut().zip(v.col(j)).for_each(|(a, b)| *a -= s * b);
            for i in 0..=(j + 1).min(n) {
                let hij = h[(i, j)] - if i == j { s } else { c(0.0, 0.0) };
                lhs.iter_mut().zip(v.col(i)).for_each(|(a, b)| *a -= hij * b);
            }
            worst = worst.max(norm2(&lhs));
        }
        prop_assert!(worst < 1e-9 * (h.frobenius_norm() + s.norm()));
    }

    #[test]
    fn least_squares_residual_matches_true_residual(seed in 0u64..1000) {
        let g = filter_diagonal(120, 4);
        let op = DiagonalOperator(g);
        let b = random_vec(120, seed);
        let shifts = composite_coeffs(16).unwrap().shifts;
        let (res, _) = solve_all_shifts(&op, &b, &shifts, 1e-9, 200).unwrap();
        for (j, &s) in shifts.iter().enumerate() {
            let tr = true_residual(&op, s, &res.solutions[j], &b);
            prop_assert!((tr - res.residual_norms[j]).abs() <= 1e-8 * norm2(&b));
        }
    }
}
