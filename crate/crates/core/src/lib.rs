//! Interior eigensolvers for non-Hermitian generalized eigenvalue problems
//! `A x = λ B x` with `λ` inside a disk.
//!
//! The solvers apply rational filters obtained from the trapezoidal
//! discretization of the circular contour integral, either directly (one
//! sparse factorization per pole) or through the composite rule
//! `R_{k1·k2} = R_{k2} ∘ T ∘ R_{k1}`, where the inner filter is applied with
//! `k1` pre-factorized shifted systems and the outer filter with multi-shift
//! GMRES on the inner operator.
//!
//! Module map:
//! - [`pencil`]: sparse storage, Matrix Market I/O, problem generators, residuals.
//! - [`rational`]: scalar filter mathematics (quadrature rules, composite rule, ratios).
//! - [`factorization`]: shifted sparse LU and the inner filter operator `G`.
//! - [`msgmres`]: multi-shift GMRES with a reusable Krylov workspace.
//! - [`dense`] and [`dense_eig`]: small dense kernels, QZ, triangular eigenvectors.
//! - [`solver`]: subspace iteration, fixed composite and adaptive composite eigensolvers.

pub mod dense;
pub mod dense_eig;
pub mod error;
pub mod factorization;
pub mod msgmres;
pub mod par;
pub mod pencil;
pub mod rational;
pub mod rng;
pub mod solver;

pub use num_complex::Complex64 as C64;

pub use error::{Error, Result};
pub use pencil::{Annulus, ComplexSparseMatrix, DiskRegion, MatrixPencil};
