use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::config::Mode;
use super::filter::OperationCounts;
use super::trace::IterationTrace;
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::pencil::DiskRegion;

pub const REPORT_SCHEMA: u32 = 1;

#[derive(Debug, Clone)]
pub struct EigenReport {
    pub mode: Mode,
    pub region: DiskRegion,
    /// In-region eigenvalues that passed the ghost filter, sorted by real
    /// then imaginary part.
    pub eigenvalues: Vec<Complex64>,
    pub right_vectors: DenseMatrix,
    pub left_vectors: DenseMatrix,
    pub residuals: Vec<f64>,
    pub left_residuals: Vec<f64>,
    pub converged: bool,
    /// Outer iterations (adaptive rounds) performed.
    pub iterations: usize,
    pub final_k2: usize,
    pub counts: OperationCounts,
    pub trace: IterationTrace,
}

/// Serialized form of [`EigenReport`] without the eigenvector blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportJson {
    pub schema: u32,
    pub mode: Mode,
    pub converged: bool,
    pub iterations: usize,
    pub final_k2: usize,
    pub region: DiskRegion,
    /// `[re, im]` pairs.
    pub eigenvalues: Vec<Complex64>,
    pub residuals: Vec<f64>,
    pub left_residuals: Vec<f64>,
    pub counts: OperationCounts,
    pub trace: TraceJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceJson {
    pub t: Vec<usize>,
    pub p: Vec<usize>,
    pub max_residual: Vec<Option<f64>>,
    pub k2: Vec<usize>,
    pub gmres_total: Vec<usize>,
    pub g_applications: Vec<usize>,
    pub gmres_iterations: Vec<Vec<usize>>,
}

impl From<&IterationTrace> for TraceJson {
    fn from(tr: &IterationTrace) -> Self {
        let r = &tr.records;
        Self {
            t: r.iter().map(|x| x.t).collect(),
            p: r.iter().map(|x| x.p).collect(),
            max_residual: r.iter().map(|x| x.max_residual).collect(),
            k2: r.iter().map(|x| x.k2).collect(),
            gmres_total: r.iter().map(|x| x.gmres_total).collect(),
            g_applications: r.iter().map(|x| x.g_applications).collect(),
            gmres_iterations: r.iter().map(|x| x.gmres_iterations.clone()).collect(),
        }
    }
}

fn finite_or_max(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        f64::MAX
    }
}

impl EigenReport {
    pub fn to_json(&self) -> ReportJson {
        ReportJson {
            schema: REPORT_SCHEMA,
            mode: self.mode,
            converged: self.converged,
            iterations: self.iterations,
            final_k2: self.final_k2,
            region: self.region,
            eigenvalues: self.eigenvalues.clone(),
            residuals: self.residuals.iter().copied().map(finite_or_max).collect(),
            left_residuals: self.left_residuals.iter().copied().map(finite_or_max).collect(),
            counts: self.counts,
            trace: (&self.trace).into(),
        }
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(&self.to_json())?;
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |m, &r| m.max(r))
    }
}

impl ReportJson {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let r: Self = serde_json::from_str(&text)?;
        if r.schema != REPORT_SCHEMA {
            return Err(Error::InvalidArgument(format!("unsupported report schema {}", r.schema)));
        }
        Ok(r)
    }
}
