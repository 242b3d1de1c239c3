//! Matrix pencils, their storage and I/O, and the synthetic problems used in
//! the experiments.

mod generators;
mod mtx;
mod region;
mod sparse;

pub use generators::{circle_sample, disk_sample, gen_power_grid, gen_spectrum_pencil, power_grid_blocks, PowerGridBlocks, SpectrumPencil};
pub use mtx::{load_matrix_market, read_matrix_market, write_matrix_market, write_matrix_market_to};
pub use region::{Annulus, DiskRegion};
pub use sparse::{ComplexSparseMatrix, Duplicates};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dense::norm2;
use crate::error::{Error, Result};

/// The generalized eigenproblem `A x = λ B x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixPencil {
    a: ComplexSparseMatrix,
    b: ComplexSparseMatrix,
}

impl MatrixPencil {
    pub fn new(a: ComplexSparseMatrix, b: ComplexSparseMatrix) -> Result<Self> {
        if !a.is_square() || !b.is_square() || a.n_rows() != b.n_rows() {
            return Err(Error::Dimension(format!(
                "pencil needs square matrices of equal size, got {}x{} and {}x{}",
                a.n_rows(),
                a.n_cols(),
                b.n_rows(),
                b.n_cols()
            )));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> &ComplexSparseMatrix {
        &self.a
    }

    pub fn b(&self) -> &ComplexSparseMatrix {
        &self.b
    }

    pub fn dim(&self) -> usize {
        self.a.n_rows()
    }

    /// `pole · B − A`.
    pub fn shifted(&self, pole: Complex64) -> ComplexSparseMatrix {
        self.b
            .linear_combination(pole, &self.a, Complex64::new(-1.0, 0.0))
            .expect("pencil matrices share dimensions")
    }
}

/// Relative eigenpair residual `‖A x − λ B x‖ / ((|c| + r) ‖B x‖)`.
pub fn relative_residual(
    pencil: &MatrixPencil,
    region: &DiskRegion,
    lambda: Complex64,
    x: &[Complex64],
) -> Result<f64> {
    let ax = pencil.a.spmv(x)?;
    let bx = pencil.b.spmv(x)?;
    residual_quotient(&ax, &bx, lambda, region)
}

/// Left-vector analogue `‖yᴴ A − λ yᴴ B‖ / ((|c| + r) ‖yᴴ B‖)`.
pub fn left_relative_residual(
    pencil: &MatrixPencil,
    region: &DiskRegion,
    lambda: Complex64,
    y: &[Complex64],
) -> Result<f64> {
    // (yᴴ A)ᴴ = Aᴴ y, and conjugating λ keeps the norm unchanged.
    let ahy = pencil.a.spmv_adjoint(y)?;
    let bhy = pencil.b.spmv_adjoint(y)?;
    residual_quotient(&ahy, &bhy, lambda.conj(), region)
}

fn residual_quotient(
    ax: &[Complex64],
    bx: &[Complex64],
    lambda: Complex64,
    region: &DiskRegion,
) -> Result<f64> {
    let bnorm = norm2(bx);
    if bnorm == 0.0 {
        return Err(Error::DefectiveDirection);
    }
    let r: Vec<Complex64> = ax.iter().zip(bx).map(|(a, b)| a - lambda * b).collect();
    Ok(norm2(&r) / (region.scale() * bnorm))
}
