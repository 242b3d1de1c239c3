//! Matrix Market coordinate format.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::sparse::{ComplexSparseMatrix, Duplicates};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Real,
    Integer,
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    Hermitian,
    SkewSymmetric,
}

pub fn load_matrix_market(path: impl AsRef<Path>) -> Result<ComplexSparseMatrix> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_matrix_market(BufReader::new(file), path)
}

/// Parses Matrix Market text from any reader; `origin` only labels errors.
pub fn read_matrix_market(reader: impl Read, origin: impl AsRef<Path>) -> Result<ComplexSparseMatrix> {
    let origin = origin.as_ref();
    let fail = |line: usize, message: String| Error::Parse {
        path: origin.to_path_buf(),
        line,
        message,
    };
    let mut lines = BufReader::new(reader).lines().enumerate().map(|(i, l)| (i + 1, l));

    let (header_no, header) = match lines.next() {
        Some((n, l)) => (n, l.map_err(|e| Error::io(origin, e))?),
        None => return Err(fail(1, "empty file".into())),
    };
    let (field, symmetry) = parse_header(&header).map_err(|m| fail(header_no, m))?;

    let mut size = None;
    for (n, line) in lines.by_ref() {
        let line = line.map_err(|e| Error::io(origin, e))?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let parts: Vec<&str> = t.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(fail(n, format!("size line needs 3 integers, found {}", parts.len())));
        }
        let mut v = [0usize; 3];
        for (slot, p) in v.iter_mut().zip(&parts) {
            *slot = p.parse().map_err(|_| fail(n, format!("bad integer '{p}' in size line")))?;
        }
        size = Some((n, v));
        break;
    }
    let (size_line, [n_rows, n_cols, declared]) =
        size.ok_or_else(|| fail(header_no, "missing size line".into()))?;
    if symmetry != Symmetry::General && n_rows != n_cols {
        return Err(fail(size_line, "symmetric storage requires a square matrix".into()));
    }

    let mut seen: HashMap<(usize, usize), usize> = HashMap::with_capacity(declared * 2);
    let mut triplets = Vec::with_capacity(declared * 2);
    let mut count = 0usize;
    let mut last_line = size_line;
    for (n, line) in lines {
        let line = line.map_err(|e| Error::io(origin, e))?;
        last_line = n;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        count += 1;
        if count > declared {
            return Err(fail(n, format!("more entries than the declared {declared}")));
        }
        let parts: Vec<&str> = t.split_whitespace().collect();
        let want = if field == Field::Complex { 4 } else { 3 };
        if parts.len() != want {
            return Err(fail(n, format!("expected {want} fields, found {}", parts.len())));
        }
        let index = |p: &str, bound: usize, what: &str| -> Result<usize> {
            let v: usize = p.parse().map_err(|_| fail(n, format!("bad {what} index '{p}'")))?;
            if v == 0 || v > bound {
                return Err(fail(n, format!("{what} index {v} outside 1..={bound}")));
            }
            Ok(v - 1)
        };
        let r = index(parts[0], n_rows, "row")?;
        let c = index(parts[1], n_cols, "column")?;
        let number = |p: &str| -> Result<f64> {
            if field == Field::Integer {
                p.parse::<i64>()
                    .map(|v| v as f64)
                    .map_err(|_| fail(n, format!("bad integer value '{p}'")))
            } else {
                p.parse::<f64>().map_err(|_| fail(n, format!("bad value '{p}'")))
            }
        };
        let re = number(parts[2])?;
        let im = if field == Field::Complex { number(parts[3])? } else { 0.0 };
        let v = Complex64::new(re, im);

        let mut push = |r: usize, c: usize, v: Complex64| -> Result<()> {
            if let Some(prev) = seen.insert((r, c), n) {
                return Err(fail(
                    n,
                    format!("duplicate entry ({}, {}), first given on line {prev}", r + 1, c + 1),
                ));
            }
            triplets.push((r, c, v));
            Ok(())
        };
        match symmetry {
            Symmetry::General => push(r, c, v)?,
            _ if r < c => {
                return Err(fail(n, "symmetric storage expects the lower triangle only".into()));
            }
            Symmetry::SkewSymmetric if r == c => {
                return Err(fail(n, "skew-symmetric matrices have no diagonal entries".into()));
            }
            Symmetry::Hermitian if r == c && im != 0.0 => {
                return Err(fail(n, "hermitian diagonal must be real".into()));
            }
            _ => {
                push(r, c, v)?;
                if r != c {
                    let mirrored = match symmetry {
                        Symmetry::Symmetric => v,
                        Symmetry::Hermitian => v.conj(),
                        _ => -v,
                    };
                    push(c, r, mirrored)?;
                }
            }
        }
    }
    if count < declared {
        return Err(fail(last_line, format!("found {count} entries, header declares {declared}")));
    }
    ComplexSparseMatrix::from_triplets(n_rows, n_cols, triplets, Duplicates::Reject)
}

fn parse_header(line: &str) -> std::result::Result<(Field, Symmetry), String> {
    let parts: Vec<String> = line.split_whitespace().map(str::to_ascii_lowercase).collect();
    if parts.len() != 5 || parts[0] != "%%matrixmarket" {
        return Err("header must read '%%MatrixMarket matrix coordinate <field> <symmetry>'".into());
    }
    if parts[1] != "matrix" {
        return Err(format!("unsupported object '{}'", parts[1]));
    }
    if parts[2] != "coordinate" {
        return Err(format!("unsupported format '{}', only coordinate is read", parts[2]));
    }
    let field = match parts[3].as_str() {
        "real" | "double" => Field::Real,
        "integer" => Field::Integer,
        "complex" => Field::Complex,
        other => return Err(format!("unsupported field '{other}'")),
    };
    let symmetry = match parts[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "hermitian" => Symmetry::Hermitian,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        other => return Err(format!("unsupported symmetry '{other}'")),
    };
    if symmetry == Symmetry::Hermitian && field != Field::Complex {
        return Err("hermitian symmetry needs a complex field".into());
    }
    Ok((field, symmetry))
}

/// Writes `m` as `coordinate complex general`, entries sorted by column then row.
pub fn write_matrix_market(m: &ComplexSparseMatrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_matrix_market_to(m, &mut w).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_matrix_market_to(m: &ComplexSparseMatrix, w: &mut impl Write) -> std::io::Result<()> {
    writeln!(w, "%%MatrixMarket matrix coordinate complex general")?;
    writeln!(w, "{} {} {}", m.n_rows(), m.n_cols(), m.nnz())?;
    // The transpose stores columns as rows, which gives (col, row) order.
    for (c, r, v) in m.transpose().iter() {
        // `{:?}` prints the shortest string that parses back to the same f64.
        writeln!(w, "{} {} {:?} {:?}", r + 1, c + 1, v.re, v.im)?;
    }
    Ok(())
}
