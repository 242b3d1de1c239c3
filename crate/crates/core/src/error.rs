use std::path::PathBuf;

use num_complex::Complex64;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("shifted matrix is singular at pole {pole}")]
    SingularPole { pole: Complex64 },

    #[error("evaluation point {z} lies on a pole (|denominator| = {distance:e})")]
    NearPole { z: Complex64, distance: f64 },

    #[error("B x vanishes; residual undefined for this direction")]
    DefectiveDirection,

    #[error("zero input to orthonormalization")]
    ZeroInput,

    #[error("subspace rank {rank} fell below the requested eigenvalue count {required}")]
    InsufficientSubspace { rank: usize, required: usize },

    #[error("QZ iteration did not converge after {sweeps} sweeps")]
    QzNoConvergence { sweeps: usize },

    #[error("could not generate a well-conditioned eigenvector matrix after {attempts} attempts")]
    IllConditionedGenerator { attempts: usize },

    #[error("multi-shift GMRES left shift {shift} at relative residual {residual:e} after {iterations} iterations")]
    GmresStalled {
        shift: Complex64,
        residual: f64,
        iterations: usize,
    },

    #[error("serialization failed: {0}")]
    Serialize(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
