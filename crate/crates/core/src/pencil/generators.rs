use num_complex::Complex64;
use rand::Rng;

use super::sparse::{ComplexSparseMatrix, Duplicates};
use super::MatrixPencil;
use crate::dense::{DenseLu, DenseMatrix};
use crate::error::{Error, Result};
use crate::rng::{seeded, standard_normal};

const LAYERS: usize = 10;
const PORTS: usize = 20;
const NODE_CAPACITANCE: f64 = 1e-3;
const GENERATOR_ATTEMPTS: usize = 10;

/// Blocks of a power-grid model `G x = λ C x` with
/// `G = [[G11, G12], [−G12ᵀ, 0]]` and `C = diag(C_c, L)`.
#[derive(Debug, Clone)]
pub struct PowerGridBlocks {
    pub n_x: usize,
    pub n_nodes: usize,
    pub n_ports: usize,
    pub n_inductors: usize,
    pub g: ComplexSparseMatrix,
    pub c: ComplexSparseMatrix,
}

impl PowerGridBlocks {
    pub fn dim(&self) -> usize {
        self.g.n_rows()
    }

    /// The pencil `(−G, C)`, whose finite eigenvalues are the poles of the
    /// circuit's transfer function.
    pub fn pencil(&self) -> MatrixPencil {
        MatrixPencil::new(self.g.scale(Complex64::new(-1.0, 0.0)), self.c.clone())
            .expect("grid blocks are square and of equal size")
    }
}

fn node(n_x: usize, i: usize, j: usize, l: usize) -> usize {
    i * n_x * LAYERS + j * LAYERS + l
}

/// Entries of the weighted 1-D Laplacian `(n/100)·tridiag(−1, 2, −1)`
/// with free ends, as `(i, j, value)`.
fn laplacian(n: usize) -> Vec<(usize, usize, f64)> {
    let w = n as f64 / 100.0;
    let mut out = Vec::with_capacity(3 * n);
    for i in 0..n {
        let degree = usize::from(i > 0) + usize::from(i + 1 < n);
        out.push((i, i, w * degree as f64));
        if i + 1 < n {
            out.push((i, i + 1, -w));
            out.push((i + 1, i, -w));
        }
    }
    out
}

pub fn power_grid_blocks(n_x: usize, seed: u64) -> Result<PowerGridBlocks> {
    if n_x < 2 {
        return Err(Error::InvalidArgument(format!("power grid needs n_x >= 2, got {n_x}")));
    }
    let n_nodes = LAYERS * n_x * n_x;
    let n_inductors = 2 * n_x * n_x;
    let n_branches = PORTS + n_inductors;
    let dim = n_nodes + n_branches;
    let mut rng = seeded(seed);
    let re = |v: f64| Complex64::new(v, 0.0);

    let mut g = Vec::new();
    for (a, b, v) in laplacian(n_x) {
        for j in 0..n_x {
            for l in 0..LAYERS {
                g.push((node(n_x, a, j, l), node(n_x, b, j, l), re(v)));
                g.push((node(n_x, j, a, l), node(n_x, j, b, l), re(v)));
            }
        }
    }
    for (a, b, v) in laplacian(LAYERS) {
        for i in 0..n_x {
            for j in 0..n_x {
                g.push((node(n_x, i, j, a), node(n_x, i, j, b), re(0.1 * v)));
            }
        }
    }

    // Incidence block G12, one column per port or inductor.
    let mut g12: Vec<(usize, usize, f64)> = Vec::with_capacity(PORTS + 2 * n_inductors);
    for p in 0..PORTS / 2 {
        let i = p * n_x / (PORTS / 2);
        g12.push((node(n_x, i, 0, 0), p, 1.0));
        g12.push((node(n_x, i, n_x - 1, LAYERS - 1), PORTS / 2 + p, 1.0));
    }
    const STEPS: [(isize, isize); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];
    for q in 0..n_inductors {
        let (i, j, l, (di, dj)) = if n_x >= 3 {
            let i = rng.random_range(1..n_x - 1);
            let j = rng.random_range(1..n_x - 1);
            let l = rng.random_range(0..LAYERS);
            (i, j, l, STEPS[rng.random_range(0..4)])
        } else {
            // No interior nodes: any node, any in-grid neighbor on its layer.
            let i = rng.random_range(0..n_x);
            let j = rng.random_range(0..n_x);
            let l = rng.random_range(0..LAYERS);
            let inside: Vec<_> = STEPS
                .iter()
                .copied()
                .filter(|&(di, dj)| {
                    let (a, b) = (i as isize + di, j as isize + dj);
                    a >= 0 && b >= 0 && (a as usize) < n_x && (b as usize) < n_x
                })
                .collect();
            (i, j, l, inside[rng.random_range(0..inside.len())])
        };
        let ni = (i as isize + di) as usize;
        let nj = (j as isize + dj) as usize;
        g12.push((node(n_x, i, j, l), PORTS + q, 1.0));
        g12.push((node(n_x, ni, nj, l), PORTS + q, -1.0));
    }
    for &(r, col, v) in &g12 {
        g.push((r, n_nodes + col, re(v)));
        g.push((n_nodes + col, r, re(-v)));
    }
    let g = ComplexSparseMatrix::from_triplets(dim, dim, g, Duplicates::Sum)?;

    let scale = n_x as f64 * 1e-4;
    let mut c = vec![re(NODE_CAPACITANCE); n_nodes];
    c.extend(std::iter::repeat_n(re(0.0), PORTS));
    c.extend((0..n_inductors).map(|_| re(rng.random_range(0.5..1.5) * scale)));
    let c = ComplexSparseMatrix::from_diagonal(&c);

    Ok(PowerGridBlocks {
        n_x,
        n_nodes,
        n_ports: PORTS,
        n_inductors,
        g,
        c,
    })
}

/// Power-grid pencil `(−G, C)` of dimension `10 n_x² + 20 + 2 n_x²`.
pub fn gen_power_grid(n_x: usize, seed: u64) -> Result<MatrixPencil> {
    Ok(power_grid_blocks(n_x, seed)?.pencil())
}

/// A pencil `(X Λ X⁻¹, I)` with a prescribed spectrum.
#[derive(Debug, Clone)]
pub struct SpectrumPencil {
    pub pencil: MatrixPencil,
    /// `inside` followed by `outside`, in the order given.
    pub eigenvalues: Vec<Complex64>,
    /// Column `i` is the eigenvector of `eigenvalues[i]`.
    pub eigenvectors: DenseMatrix,
    /// Seed that produced a well-conditioned `X` (the input seed or a successor).
    pub seed_used: u64,
}

pub fn gen_spectrum_pencil(inside: &[Complex64], outside: &[Complex64], seed: u64) -> Result<SpectrumPencil> {
    if inside.iter().any(|z| outside.contains(z)) {
        return Err(Error::InvalidArgument("inside and outside eigenvalues overlap".into()));
    }
    let eigenvalues: Vec<Complex64> = inside.iter().chain(outside).copied().collect();
    let n = eigenvalues.len();
    if n == 0 {
        return Err(Error::InvalidArgument("spectrum is empty".into()));
    }
    for attempt in 0..GENERATOR_ATTEMPTS as u64 {
        let seed_used = seed.wrapping_add(attempt);
        let mut rng = seeded(seed_used);
        let x = DenseMatrix::from_fn(n, n, |_, _| {
            Complex64::new(standard_normal(&mut rng), standard_normal(&mut rng))
        });
        let Ok(lu) = DenseLu::factor(&x) else { continue };
        let x_inv = lu.solve_block(&DenseMatrix::identity(n))?;
        let cond = x.frobenius_norm() * x_inv.frobenius_norm();
        if !cond.is_finite() || cond > 1e10 {
            continue;
        }
        let mut x_lambda = x.clone();
        for (j, col) in x_lambda.columns_mut().enumerate() {
            col.iter_mut().for_each(|v| *v *= eigenvalues[j]);
        }
        let a = x_lambda.matmul(&x_inv)?;
        let pencil = MatrixPencil::new(ComplexSparseMatrix::from_dense(&a), ComplexSparseMatrix::identity(n))?;
        return Ok(SpectrumPencil {
            pencil,
            eigenvalues,
            eigenvectors: x,
            seed_used,
        });
    }
    Err(Error::IllConditionedGenerator {
        attempts: GENERATOR_ATTEMPTS,
    })
}

/// `n` points uniformly distributed in the disk `|z| ≤ radius`.
pub fn disk_sample(n: usize, radius: f64, seed: u64) -> Vec<Complex64> {
    let mut rng = seeded(seed);
    (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            let t: f64 = rng.random();
            Complex64::from_polar(radius * u.sqrt(), std::f64::consts::TAU * t)
        })
        .collect()
}

/// `n` equispaced points on `|z| = radius`, rotated by a random phase.
pub fn circle_sample(n: usize, radius: f64, seed: u64) -> Vec<Complex64> {
    let phase: f64 = seeded(seed).random::<f64>() * std::f64::consts::TAU;
    (0..n)
        .map(|i| Complex64::from_polar(radius, phase + std::f64::consts::TAU * i as f64 / n as f64))
        .collect()
}
