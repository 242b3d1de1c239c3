use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One outer iteration (or one adaptive round).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub t: usize,
    /// Outer filter order in effect; `1` for the simple rule.
    pub k2: usize,
    /// Residual of every Ritz pair; `None` for infinite Ritz values.
    pub residuals: Vec<Option<f64>>,
    /// Number of pairs that passed the ghost filter.
    pub p: usize,
    /// Largest residual among the filtered pairs.
    pub max_residual: Option<f64>,
    /// GMRES iterations per column, `n_iter^{(j,t)}`.
    pub gmres_iterations: Vec<usize>,
    pub gmres_total: usize,
    /// Cumulative columns the inner operator has been applied to.
    pub g_applications: usize,
    /// Cumulative triangular solve pairs.
    pub solves: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub records: Vec<IterationRecord>,
}

pub const CSV_HEADER: &str = "t,p,max_residual,k2,gmres_total";

impl IterationTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&IterationRecord> {
        self.records.last()
    }

    pub fn push(&mut self, r: IterationRecord) {
        self.records.push(r);
    }

    pub fn write_csv_to(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "{CSV_HEADER}")?;
        for r in &self.records {
            let max = r.max_residual.map(|v| format!("{v:.16e}")).unwrap_or_default();
            writeln!(out, "{},{},{},{},{}", r.t, r.p, max, r.k2, r.gmres_total)?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv_to(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }
}

/// A parsed row of the trace CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub t: usize,
    pub p: usize,
    pub max_residual: Option<f64>,
    pub k2: usize,
    pub gmres_total: usize,
}

/// Reads a trace CSV back.
pub fn parse_trace_csv(text: &str) -> Result<Vec<CsvRow>> {
    let mut lines = text.lines().enumerate();
    let bad = |line: usize, message: String| Error::Parse {
        path: "<trace>".into(),
        line,
        message,
    };
    match lines.next() {
        Some((_, h)) if h.trim() == CSV_HEADER => {}
        _ => return Err(bad(1, format!("expected header `{CSV_HEADER}`"))),
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 5 {
            return Err(bad(i + 1, format!("expected 5 fields, found {}", f.len())));
        }
        let int = |s: &str| s.trim().parse::<usize>().map_err(|e| bad(i + 1, e.to_string()));
        let max_residual = if f[2].is_empty() {
            None
        } else {
            Some(f[2].parse::<f64>().map_err(|e| bad(i + 1, e.to_string()))?)
        };
        rows.push(CsvRow {
            t: int(f[0])?,
            p: int(f[1])?,
            max_residual,
            k2: int(f[3])?,
            gmres_total: int(f[4])?,
        });
    }
    Ok(rows)
}
