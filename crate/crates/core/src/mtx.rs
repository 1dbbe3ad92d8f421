//! Matrix Market reader and writer for complex dense matrices.
//!
//! Writes always use field `complex` and symmetry `general`:
//!
//! ```text
//! %%MatrixMarket matrix coordinate complex general
//! ```
//!
//! Reads also accept `real`/`integer` fields and `symmetric`,
//! `skew-symmetric` and `hermitian` storage, expanding them to full matrices.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MtxFormat {
    /// Sparse triplets; exact zeros are omitted.
    Coordinate,
    /// Dense column-major listing.
    Array,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Field {
    Real,
    Complex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
    Hermitian,
}

pub fn write_matrix<W: Write>(out: W, m: &CMatrix, format: MtxFormat) -> Result<()> {
    let mut w = BufWriter::new(out);
    match format {
        MtxFormat::Coordinate => {
            writeln!(w, "%%MatrixMarket matrix coordinate complex general")?;
            writeln!(w, "{} {} {}", m.rows(), m.cols(), m.nnz())?;
            for j in 0..m.cols() {
                for (i, z) in m.col(j).iter().enumerate() {
                    if z.re != 0.0 || z.im != 0.0 {
                        writeln!(w, "{} {} {:e} {:e}", i + 1, j + 1, z.re, z.im)?;
                    }
                }
            }
        }
        MtxFormat::Array => {
            writeln!(w, "%%MatrixMarket matrix array complex general")?;
            writeln!(w, "{} {}", m.rows(), m.cols())?;
            for z in m.as_slice() {
                writeln!(w, "{:e} {:e}", z.re, z.im)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_matrix_file(path: impl AsRef<Path>, m: &CMatrix, format: MtxFormat) -> Result<()> {
    write_matrix(File::create(path)?, m, format)
}

pub fn read_matrix_file(path: impl AsRef<Path>) -> Result<CMatrix> {
    read_matrix(File::open(path)?)
}

pub fn read_matrix_str(text: &str) -> Result<CMatrix> {
    read_matrix(text.as_bytes())
}

pub fn read_matrix<R: Read>(input: R) -> Result<CMatrix> {
    let reader = BufReader::new(input);
    let mut lines = reader.lines().enumerate();
    let err = |line: usize, msg: &str| Error::MatrixMarket {
        line: line + 1,
        msg: msg.to_string(),
    };

    let (hline, header) = match lines.next() {
        Some((i, l)) => (i, l?),
        None => return Err(err(0, "empty input")),
    };
    let tokens: Vec<String> = header.split_whitespace().map(str::to_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(err(
            hline,
            "header must read `%%MatrixMarket matrix <format> <field> <symmetry>`",
        ));
    }
    let coordinate = match tokens[2].as_str() {
        "coordinate" => true,
        "array" => false,
        other => return Err(err(hline, &format!("unknown format `{other}`"))),
    };
    let field = match tokens[3].as_str() {
        "complex" => Field::Complex,
        "real" | "integer" | "double" => Field::Real,
        other => return Err(err(hline, &format!("unsupported field `{other}`"))),
    };
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        "hermitian" => Symmetry::Hermitian,
        other => return Err(err(hline, &format!("unsupported symmetry `{other}`"))),
    };

    // skip comments and blank lines until the size line
    let mut data_lines = lines.filter_map(|(i, l)| match l {
        Ok(s) => {
            let t = s.trim();
            if t.is_empty() || t.starts_with('%') {
                None
            } else {
                Some(Ok((i, t.to_string())))
            }
        }
        Err(e) => Some(Err(e)),
    });

    let (sline, size) = data_lines
        .next()
        .ok_or_else(|| err(hline + 1, "missing size line"))??;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| err(sline, "size line must contain non-negative integers"))?;
    let (rows, cols, nnz) = match (coordinate, dims.as_slice()) {
        (true, [r, c, n]) => (*r, *c, *n),
        (false, [r, c]) => (*r, *c, r * c),
        _ => return Err(err(sline, "wrong number of entries on size line")),
    };
    if rows == 0 || cols == 0 {
        return Err(err(sline, "matrix dimensions must be at least 1"));
    }
    if symmetry != Symmetry::General && rows != cols {
        return Err(err(sline, "symmetric storage requires a square matrix"));
    }

    let parse_value = |line: usize, toks: &[&str]| -> Result<C64> {
        let f = |t: &str| {
            t.parse::<f64>()
                .map_err(|_| err(line, &format!("cannot parse number `{t}`")))
        };
        let z = match (field, toks) {
            (Field::Complex, [re, im]) => C64::new(f(re)?, f(im)?),
            (Field::Real, [re]) => C64::new(f(re)?, 0.0),
            _ => return Err(err(line, "wrong number of value fields")),
        };
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(err(line, "non-finite entry"));
        }
        Ok(z)
    };

    let mut m = CMatrix::zeros(rows, cols);
    let place = |m: &mut CMatrix, i: usize, j: usize, z: C64| {
        m[(i, j)] = z;
        if i != j {
            match symmetry {
                Symmetry::General => {}
                Symmetry::Symmetric => m[(j, i)] = z,
                Symmetry::SkewSymmetric => m[(j, i)] = -z,
                Symmetry::Hermitian => m[(j, i)] = z.conj(),
            }
        }
    };

    if coordinate {
        let mut count = 0;
        for item in data_lines {
            let (line, text) = item?;
            let toks: Vec<&str> = text.split_whitespace().collect();
            if toks.len() < 3 {
                return Err(err(line, "coordinate entry needs row, column and value"));
            }
            let idx = |t: &str, bound: usize| -> Result<usize> {
                let k: usize = t
                    .parse()
                    .map_err(|_| err(line, &format!("bad index `{t}`")))?;
                if k == 0 || k > bound {
                    return Err(err(line, &format!("index {k} out of range 1..={bound}")));
                }
                Ok(k - 1)
            };
            let i = idx(toks[0], rows)?;
            let j = idx(toks[1], cols)?;
            let z = parse_value(line, &toks[2..])?;
            place(&mut m, i, j, z);
            count += 1;
        }
        if count != nnz {
            return Err(err(
                sline,
                &format!("expected {nnz} entries, found {count}"),
            ));
        }
    } else {
        // array: column-major; symmetric variants list the lower triangle
        let mut positions = Vec::with_capacity(nnz);
        for j in 0..cols {
            let start = match symmetry {
                Symmetry::General => 0,
                Symmetry::SkewSymmetric => j + 1,
                _ => j,
            };
            for i in start..rows {
                positions.push((i, j));
            }
        }
        let mut it = positions.into_iter();
        let mut extra = false;
        for item in data_lines {
            let (line, text) = item?;
            let toks: Vec<&str> = text.split_whitespace().collect();
            let z = parse_value(line, &toks)?;
            match it.next() {
                Some((i, j)) => place(&mut m, i, j, z),
                None => {
                    extra = true;
                    break;
                }
            }
        }
        if extra || it.next().is_some() {
            return Err(err(sline, "array entry count does not match dimensions"));
        }
    }
    Ok(m)
}
