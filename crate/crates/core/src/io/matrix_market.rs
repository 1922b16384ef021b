//! Matrix Market coordinate files.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::csr::CsrMatrix;
use crate::error::{Error, Result};
use crate::triplet::TripletMatrix;
use crate::width::{IndexType, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Field {
    Real,
    Integer,
    Pattern,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
}

/// The banner line. Only `matrix coordinate` objects are accepted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MatrixMarketHeader {
    pub field: Field,
    pub symmetry: Symmetry,
}

impl MatrixMarketHeader {
    pub fn parse(line: &str) -> Result<Self> {
        let lower = line.trim().to_ascii_lowercase();
        let mut words = lower.split_whitespace();
        if words.next() != Some("%%matrixmarket") {
            return Err(Error::parse(1, "missing %%MatrixMarket banner"));
        }
        let mut next = |what: &str| {
            words
                .next()
                .ok_or_else(|| Error::parse(1, format!("banner lacks {what}")))
        };
        let object = next("an object")?;
        if object != "matrix" {
            return Err(Error::UnsupportedFormat(format!("object `{object}`")));
        }
        match next("a format")? {
            "coordinate" => {}
            other => {
                return Err(Error::UnsupportedFormat(format!(
                    "`{other}` storage (only coordinate is supported)"
                )))
            }
        }
        let field = match next("a field")? {
            "real" => Field::Real,
            "integer" => Field::Integer,
            "pattern" => Field::Pattern,
            other => return Err(Error::UnsupportedFormat(format!("`{other}` field"))),
        };
        let symmetry = match next("a symmetry")? {
            "general" => Symmetry::General,
            "symmetric" => Symmetry::Symmetric,
            "skew-symmetric" => Symmetry::SkewSymmetric,
            other => return Err(Error::UnsupportedFormat(format!("`{other}` symmetry"))),
        };
        Ok(MatrixMarketHeader { field, symmetry })
    }
}

fn is_skippable(line: &str) -> bool {
    let t = line.trim();
    t.is_empty() || t.starts_with('%')
}

fn parse_index(tok: Option<&str>, bound: usize, line: usize, what: &str) -> Result<usize> {
    let tok = tok.ok_or_else(|| Error::parse(line, format!("missing {what} index")))?;
    let v: usize = tok
        .parse()
        .map_err(|_| Error::parse(line, format!("bad {what} index `{tok}`")))?;
    if v == 0 || v > bound {
        return Err(Error::parse(
            line,
            format!("{what} index {v} outside 1..={bound}"),
        ));
    }
    Ok(v - 1)
}

/// Reads a coordinate file into 0-based triplets. Symmetric storage is
/// expanded; skew-symmetric mirrors are negated; pattern entries get 1.0.
pub fn read_matrix_market(source: impl BufRead) -> Result<TripletMatrix<f64>> {
    let mut lines = source.lines().enumerate().map(|(i, l)| (i + 1, l));

    let header = match lines.next() {
        Some((_, line)) => MatrixMarketHeader::parse(&line?)?,
        None => return Err(Error::parse(1, "empty input")),
    };

    let mut size = None;
    for (no, line) in lines.by_ref() {
        let line = line?;
        if is_skippable(&line) {
            continue;
        }
        let dims: Vec<usize> = line
            .split_whitespace()
            .map(|t| {
                t.parse()
                    .map_err(|_| Error::parse(no, format!("bad size entry `{t}`")))
            })
            .collect::<Result<_>>()?;
        if dims.len() != 3 {
            return Err(Error::parse(
                no,
                "size line must hold rows, columns and entries",
            ));
        }
        size = Some((dims[0], dims[1], dims[2]));
        break;
    }
    let (nrows, ncols, declared) = size.ok_or_else(|| Error::parse(1, "missing size line"))?;

    let expand = header.symmetry != Symmetry::General;
    let capacity = if expand {
        declared.saturating_mul(2)
    } else {
        declared
    };
    let mut t = TripletMatrix::with_capacity(nrows, ncols, capacity.min(1 << 28));
    let mut seen = 0usize;
    let mut last_line = 1;
    for (no, line) in lines {
        let line = line?;
        last_line = no;
        if is_skippable(&line) {
            continue;
        }
        if seen == declared {
            return Err(Error::parse(
                no,
                format!("more than the declared {declared} entries"),
            ));
        }
        let mut tok = line.split_whitespace();
        let r = parse_index(tok.next(), nrows, no, "row")?;
        let c = parse_index(tok.next(), ncols, no, "column")?;
        let v = match header.field {
            Field::Pattern => 1.0,
            Field::Real | Field::Integer => {
                let s = tok
                    .next()
                    .ok_or_else(|| Error::parse(no, "missing value"))?;
                s.parse::<f64>()
                    .map_err(|_| Error::parse(no, format!("bad value `{s}`")))?
            }
        };
        if tok.next().is_some() {
            return Err(Error::parse(no, "trailing tokens"));
        }
        match header.symmetry {
            Symmetry::General => t.push(r, c, v)?,
            Symmetry::Symmetric => {
                t.push(r, c, v)?;
                if r != c {
                    t.push(c, r, v)?;
                }
            }
            Symmetry::SkewSymmetric => {
                if r == c {
                    return Err(Error::parse(
                        no,
                        "diagonal entry in a skew-symmetric matrix",
                    ));
                }
                t.push(r, c, v)?;
                t.push(c, r, -v)?;
            }
        }
        seen += 1;
    }
    if seen != declared {
        return Err(Error::parse(
            last_line,
            format!("expected {declared} entries, found {seen}"),
        ));
    }
    Ok(t)
}

pub fn read_matrix_market_path(path: impl AsRef<Path>) -> Result<TripletMatrix<f64>> {
    read_matrix_market(BufReader::new(File::open(path)?))
}

/// Writes `real general` coordinates, 1-based, one entry per line in row order.
pub fn write_matrix_market<O: IndexType, I: IndexType, S: Scalar>(
    a: &CsrMatrix<O, I, S>,
    sink: impl Write,
) -> Result<()> {
    let mut w = BufWriter::new(sink);
    writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(w, "{} {} {}", a.nrows(), a.ncols(), a.nnz())?;
    for (r, c, v) in a.iter() {
        writeln!(w, "{} {} {:e}", r + 1, c + 1, v)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_matrix_market_path<O: IndexType, I: IndexType, S: Scalar>(
    a: &CsrMatrix<O, I, S>,
    path: impl AsRef<Path>,
) -> Result<()> {
    write_matrix_market(a, File::create(path)?)
}
