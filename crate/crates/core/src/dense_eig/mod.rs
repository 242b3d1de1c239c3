//! Small dense eigen-kernels: orthonormalization, generalized Schur form by
//! QZ, and eigenvectors of the reduced pencil.

mod eigvecs;
mod householder;
mod orth;
mod qz;

pub use eigvecs::{triangular_eigvecs, TriangularEigvecs};
pub use orth::{orth, orthogonality_error, thin_q, RANK_TOL};
pub use qz::{hessenberg_triangular, qz, qz_eigenvalues, GeneralizedSchur};

use num_complex::Complex64;

use crate::dense::{DenseLu, DenseMatrix};
use crate::error::{Error, Result};
use crate::pencil::MatrixPencil;

/// Threshold on `|β| / ‖M_B‖` below which an eigenvalue is reported infinite.
pub const INFINITE_TOL: f64 = 1e-13;

/// Eigen-decomposition of a small dense pencil `(M_A, M_B)`.
#[derive(Debug, Clone)]
pub struct ReducedEig {
    /// `α_i / β_i`, or `None` for an infinite or indefinite eigenvalue.
    pub eigenvalues: Vec<Option<Complex64>>,
    pub alpha: Vec<Complex64>,
    pub beta: Vec<Complex64>,
    /// `P_R V_R`: right eigenvectors of `(M_A, M_B)`.
    pub right: DenseMatrix,
    /// `P_L V_L`: left eigenvectors of `(M_A, M_B)`.
    pub left: DenseMatrix,
    /// Indices where both `α` and `β` are negligible.
    pub indefinite: Vec<usize>,
    /// Indices whose eigenvectors needed a perturbed back-substitution.
    pub perturbed: Vec<usize>,
    pub schur: GeneralizedSchur,
}

/// QZ, triangular eigenvectors, and back-transformation to the input basis.
pub fn reduced_solve(m_a: &DenseMatrix, m_b: &DenseMatrix) -> Result<ReducedEig> {
    let schur = qz(m_a, m_b)?;
    let vecs = triangular_eigvecs(&schur);
    let (na, nb) = (m_a.frobenius_norm(), m_b.frobenius_norm());
    let mut eigenvalues = Vec::with_capacity(schur.dim());
    let mut alpha = Vec::with_capacity(schur.dim());
    let mut beta = Vec::with_capacity(schur.dim());
    let mut indefinite = Vec::new();
    for (i, (a, b)) in schur.pairs().into_iter().enumerate() {
        let a_small = a.norm() <= INFINITE_TOL * na;
        let b_small = b.norm() <= INFINITE_TOL * nb;
        if a_small && b_small {
            indefinite.push(i);
        }
        eigenvalues.push(if b_small { None } else { Some(a / b) });
        alpha.push(a);
        beta.push(b);
    }
    let right = schur.p_r.matmul(&vecs.right)?;
    let left = schur.p_l.matmul(&vecs.left)?;
    Ok(ReducedEig {
        eigenvalues,
        alpha,
        beta,
        right,
        left,
        indefinite,
        perturbed: vecs.perturbed,
        schur,
    })
}

/// All eigenvalues of a dense pencil through the shift-invert form
/// `M = (A − σB)⁻¹ B`, `λ = σ + 1/μ`. Eigenvalues with `μ = 0` (infinite)
/// are omitted.
pub fn dense_shift_invert_eigenvalues(a: &DenseMatrix, b: &DenseMatrix, sigma: Complex64) -> Result<Vec<Complex64>> {
    let k = a.combine(Complex64::new(1.0, 0.0), b, -sigma)?;
    let lu = DenseLu::factor(&k).map_err(|_| Error::SingularPole { pole: sigma })?;
    let m = lu.solve_block(b)?;
    let n = m.n_rows();
    let pairs = qz_eigenvalues(&m, &DenseMatrix::identity(n))?;
    Ok(pairs
        .into_iter()
        .filter_map(|(mu, beta)| {
            let mu = mu / beta;
            (mu != Complex64::new(0.0, 0.0)).then(|| sigma + mu.inv())
        })
        .collect())
}

/// Dense reference eigenvalues of a sparse pencil.
pub fn dense_pencil_eigenvalues(pencil: &MatrixPencil, sigma: Complex64) -> Result<Vec<Complex64>> {
    dense_shift_invert_eigenvalues(&pencil.a().to_dense(), &pencil.b().to_dense(), sigma)
}
