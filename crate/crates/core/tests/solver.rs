use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;
use rfeig::pencil::{gen_spectrum_pencil, ComplexSparseMatrix, DiskRegion, MatrixPencil, SpectrumPencil};
use rfeig::rational::separation_ratio_closed;
use rfeig::rng::{complex_normal, seeded};
use rfeig::solver::{parse_trace_csv, solve, solve_adaptive, solve_fixed_composite, solve_simple, Mode, ReportJson, SolverConfig};
use rfeig::{Annulus, Error};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn toy() -> SpectrumPencil {
    let outside = Complex64::from_polar(2f64.powf(0.25), FRAC_PI_4);
    gen_spectrum_pencil(&[c(0.0, 0.0), c(0.75, 0.0)], &[outside], 1).unwrap()
}

fn toy_config(k: usize) -> SolverConfig {
    let mut cfg = SolverConfig::new(DiskRegion::unit(), 2);
    cfg.n_col = Some(2);
    cfg.k1 = k;
    cfg
}

/// Diagonal pencil with `inside` eigenvalues in `|w| ≤ a` and the rest in
/// `b ≤ |w| ≤ 2b`, in coordinates normalized to `region`.
fn annulus_pencil(region: &DiskRegion, inside: usize, outside: usize, a: f64, b: f64, seed: u64) -> MatrixPencil {
    let mut rng = seeded(seed);
    let mut d = Vec::new();
    for i in 0..inside + outside {
        let dir = complex_normal(&mut rng);
        let dir = dir / dir.norm();
        let rho = if i < inside { a * (0.2 + 0.8 * (i as f64 / inside as f64)) } else { b * (1.0 + (i - inside) as f64 / outside as f64) };
        d.push(region.center() + region.radius() * rho * dir);
    }
    // A non-trivial diagonal B keeps the problem generalized.
    let bdiag: Vec<Complex64> = (0..d.len()).map(|i| c(1.0 + 0.1 * (i % 3) as f64, 0.0)).collect();
    let a_diag: Vec<Complex64> = d.iter().zip(&bdiag).map(|(l, b)| l * b).collect();
    MatrixPencil::new(ComplexSparseMatrix::from_diagonal(&a_diag), ComplexSparseMatrix::from_diagonal(&bdiag)).unwrap()
}

#[test]
fn toy_simple_rule_k16_finds_both_pairs() {
    let t = toy();
    let r = solve_simple(&t.pencil, &toy_config(16)).unwrap();
    assert!(r.converged);
    assert_eq!(r.eigenvalues.len(), 2);
    assert!((r.eigenvalues[0] - c(0.0, 0.0)).norm() < 1e-8);
    assert!((r.eigenvalues[1] - c(0.75, 0.0)).norm() < 1e-8);
    assert!(r.residuals.iter().all(|&x| x <= 1e-8));

    // Residual contraction per iteration tracks |R(λ3)| / |R(λ2)| ≈ 0.0594.
    let maxes: Vec<f64> = r.trace.records.iter().filter_map(|x| x.max_residual).collect();
    let rates: Vec<f64> = maxes.windows(2).map(|w| w[1] / w[0]).filter(|q| q.is_finite() && *q > 0.0).collect();
    assert!(!rates.is_empty());
    let best = rates.iter().copied().fold(f64::INFINITY, f64::min);
    assert!(best < 0.2, "observed rates {rates:?}");
}

#[test]
fn toy_simple_rule_k4_misses_an_interior_pair() {
    let t = toy();
    let r = solve_simple(&t.pencil, &toy_config(4)).unwrap();
    let found_both = r.eigenvalues.len() == 2
        && r.eigenvalues.iter().any(|l| (l - c(0.75, 0.0)).norm() < 1e-6)
        && r.eigenvalues.iter().any(|l| l.norm() < 1e-6);
    assert!(!(r.converged && found_both));
}

#[test]
fn reported_pairs_are_inside_and_accurate() {
    let region = DiskRegion::new(c(2.0, -1.0), 0.5).unwrap();
    let p = annulus_pencil(&region, 6, 60, 0.8, 1.2, 3);
    let mut cfg = SolverConfig::new(region, 6);
    cfg.k1 = 8;
    for mode in [Mode::Simple, Mode::Composite, Mode::Adaptive] {
        cfg.mode = mode;
        let r = solve(&p, &cfg).unwrap();
        assert!(r.converged, "{mode:?}");
        assert_eq!(r.eigenvalues.len(), 6);
        assert!(r.eigenvalues.iter().all(|&l| region.contains(l)));
        assert!(r.residuals.iter().all(|&x| x <= cfg.tol));
        assert!(r.left_residuals.iter().all(|&x| x <= 1e-6));
    }
}

#[test]
fn adaptive_converges_within_predicted_order() {
    let region = DiskRegion::new(c(0.0, 0.0), 1.0).unwrap();
    let (a, b) = (0.8, 1.2);
    let p = annulus_pencil(&region, 8, 80, a, b, 9);
    let mut cfg = SolverConfig::new(region, 8);
    cfg.mode = Mode::Adaptive;
    cfg.k1 = 4;
    cfg.k2 = 4;
    let r = solve_adaptive(&p, &cfg).unwrap();
    assert!(r.converged);
    assert_eq!(r.eigenvalues.len(), 8);
    assert!(r.final_k2 <= 32, "k2 = {}", r.final_k2);
    // The separation at the final order is far below the target.
    let sep = separation_ratio_closed(&Annulus::new(a, b).unwrap(), cfg.k1 * r.final_k2);
    assert!(sep < 1e-4);
    let ks: Vec<usize> = r.trace.records.iter().map(|x| x.k2).collect();
    assert!(ks.windows(2).all(|w| w[1] == 2 * w[0]));
    // Only the initial Ỹ = G(Y) touches Y; every other application is GMRES.
    assert_eq!(r.counts.g_columns, cfg.n_col() + r.counts.gmres_iterations);
    assert_eq!(r.counts.factorizations, 4);
}

#[test]
fn composite_accounting_matches_gmres_counts() {
    let region = DiskRegion::new(c(1.0, 1.0), 2.0).unwrap();
    let p = annulus_pencil(&region, 5, 50, 0.7, 1.3, 4);
    let mut cfg = SolverConfig::new(region, 5);
    cfg.mode = Mode::Composite;
    cfg.k1 = 4;
    cfg.k2 = 4;
    let r = solve_fixed_composite(&p, &cfg).unwrap();
    let n_col = cfg.n_col();
    let mut prev = 0;
    for rec in &r.trace.records {
        assert_eq!(rec.gmres_iterations.len(), n_col);
        assert_eq!(rec.g_applications - prev, n_col + rec.gmres_total);
        prev = rec.g_applications;
    }
}

#[test]
fn simple_rule_solves_per_iteration() {
    let region = DiskRegion::unit();
    let p = annulus_pencil(&region, 3, 30, 0.6, 1.4, 5);
    let mut cfg = SolverConfig::new(region, 3);
    cfg.k1 = 8;
    let r = solve_simple(&p, &cfg).unwrap();
    let n_col = cfg.n_col();
    let mut prev = 0;
    for rec in &r.trace.records {
        assert_eq!(rec.solves - prev, 8 * n_col);
        prev = rec.solves;
    }
}

#[test]
fn runs_are_deterministic() {
    let region = DiskRegion::new(c(0.0, 0.5), 1.0).unwrap();
    let p = annulus_pencil(&region, 4, 40, 0.7, 1.3, 6);
    let mut cfg = SolverConfig::new(region, 4);
    cfg.mode = Mode::Composite;
    cfg.k1 = 4;
    cfg.k2 = 2;
    let r1 = solve(&p, &cfg).unwrap();
    let r2 = solve(&p, &cfg).unwrap();
    assert_eq!(r1.eigenvalues, r2.eigenvalues);
    assert_eq!(r1.right_vectors, r2.right_vectors);
    assert_eq!(r1.trace, r2.trace);
    cfg.threads = 0;
    let r3 = solve(&p, &cfg).unwrap();
    for (a, b) in r1.eigenvalues.iter().zip(&r3.eigenvalues) {
        assert!((a - b).norm() <= 1e-12 * a.norm().max(1.0));
    }
}

#[test]
fn report_serialization_round_trips() {
    let t = toy();
    let r = solve_simple(&t.pencil, &toy_config(16)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    r.write_json(&path).unwrap();
    let back = ReportJson::read(&path).unwrap();
    assert_eq!(back, r.to_json());
    assert_eq!(back.schema, 1);
    let text = std::fs::read_to_string(&path).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["eigenvalues"][1][0].as_f64().unwrap(), r.eigenvalues[1].re);

    let csv = dir.path().join("trace.csv");
    r.trace.write_csv(&csv).unwrap();
    let rows = parse_trace_csv(&std::fs::read_to_string(&csv).unwrap()).unwrap();
    assert_eq!(rows.len(), r.iterations);
    for (row, rec) in rows.iter().zip(&r.trace.records) {
        assert_eq!(row.max_residual, rec.max_residual);
        assert_eq!(row.p, rec.p);
    }
}

#[test]
fn invalid_configurations_are_rejected() {
    let t = toy();
    let mut cfg = toy_config(16);
    cfg.n_col = Some(5);
    assert!(matches!(solve_simple(&t.pencil, &cfg), Err(Error::InvalidArgument(_))));
    let mut cfg = toy_config(16);
    cfg.ghost_tol = 1e-9;
    assert!(solve_simple(&t.pencil, &cfg).is_err());
}

#[test]
fn exhausted_outer_loop_reports_non_convergence() {
    let t = toy();
    let mut cfg = toy_config(4);
    cfg.max_outer = 2;
    cfg.tol = 1e-15;
    let r = solve_simple(&t.pencil, &cfg).unwrap();
    assert!(!r.converged);
    assert_eq!(r.iterations, 2);
}
