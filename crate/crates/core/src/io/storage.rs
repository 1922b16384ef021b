//! Plain-text container for converted matrices.
//!
//! ```text
//! %%SparseStorage dacsr i32 i16 f64
//! 4 4 5
//! 0 1 2 4 5
//! 0 1 -1 1 0
//! 1e0 2e0 3e0 4e0 5e0
//! ```
//!
//! The banner records the layout and the three widths, the second line the
//! shape, then row pointers, column indices (or diagonal offsets) and values,
//! one array per line. Every stored integer is checked against its declared
//! width on read.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::csr::CsrMatrix;
use crate::dacsr::DacsrMatrix;
use crate::error::{Error, Result};
use crate::format::{FormatSpec, StorageKind, WideCsr};
use crate::width::{IndexType, IndexWidth, Scalar, ScalarWidth};

const BANNER: &str = "%%SparseStorage";

/// A matrix as read from the container, before conversion to a typed form.
#[derive(Clone, Debug, PartialEq)]
pub struct StoredMatrix {
    pub format: FormatSpec,
    pub nrows: usize,
    pub ncols: usize,
    pub rowptr: Vec<i64>,
    pub indices: Vec<i64>,
    pub values: Vec<f64>,
}

impl StoredMatrix {
    /// Validates the arrays and rebuilds a wide CSR matrix.
    pub fn to_wide_csr(&self) -> Result<WideCsr> {
        match self.format.kind {
            StorageKind::Csr => WideCsr::from_raw(
                self.nrows,
                self.ncols,
                self.rowptr.clone(),
                self.indices.clone(),
                self.values.clone(),
            ),
            StorageKind::Dacsr => DacsrMatrix::<i64, i64, f64>::from_raw(
                self.nrows,
                self.ncols,
                self.rowptr.clone(),
                self.indices.clone(),
                self.values.clone(),
            )?
            .to_csr::<i64>(),
        }
    }
}

fn write_array<T: std::fmt::Display>(
    w: &mut impl Write,
    items: impl Iterator<Item = T>,
) -> Result<()> {
    let mut first = true;
    for v in items {
        if !first {
            w.write_all(b" ")?;
        }
        write!(w, "{v}")?;
        first = false;
    }
    writeln!(w)?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn write_parts<O: IndexType, I: IndexType, S: Scalar>(
    kind: StorageKind,
    nrows: usize,
    ncols: usize,
    rowptr: &[O],
    indices: &[I],
    values: &[S],
    sink: impl Write,
) -> Result<()> {
    let mut w = BufWriter::new(sink);
    writeln!(w, "{BANNER} {kind} {} {} {}", O::WIDTH, I::WIDTH, S::WIDTH)?;
    writeln!(w, "{nrows} {ncols} {}", values.len())?;
    write_array(&mut w, rowptr.iter())?;
    write_array(&mut w, indices.iter())?;
    // `{:e}` prints the shortest representation that round-trips.
    write_array(&mut w, values.iter().map(|v| format!("{v:e}")))?;
    w.flush()?;
    Ok(())
}

pub fn write_csr<O: IndexType, I: IndexType, S: Scalar>(
    a: &CsrMatrix<O, I, S>,
    sink: impl Write,
) -> Result<()> {
    write_parts(
        StorageKind::Csr,
        a.nrows(),
        a.ncols(),
        a.rowptr(),
        a.colids(),
        a.values(),
        sink,
    )
}

pub fn write_dacsr<O: IndexType, I: IndexType, S: Scalar>(
    a: &DacsrMatrix<O, I, S>,
    sink: impl Write,
) -> Result<()> {
    write_parts(
        StorageKind::Dacsr,
        a.nrows(),
        a.ncols(),
        a.rowptr(),
        a.colids(),
        a.values(),
        sink,
    )
}

fn next_line(
    lines: &mut impl Iterator<Item = (usize, std::io::Result<String>)>,
    what: &str,
) -> Result<(usize, String)> {
    match lines.next() {
        Some((no, line)) => Ok((no, line?)),
        None => Err(Error::parse(0, format!("missing {what} line"))),
    }
}

fn parse_ints(
    line: &str,
    no: usize,
    width: IndexWidth,
    expected: usize,
    what: &str,
) -> Result<Vec<i64>> {
    let lo = -(width.max_value() as i128) - 1;
    let hi = width.max_value() as i128;
    let out: Vec<i64> = line
        .split_whitespace()
        .map(|t| {
            let v: i64 = t
                .parse()
                .map_err(|_| Error::parse(no, format!("bad {what} `{t}`")))?;
            if (v as i128) < lo || (v as i128) > hi {
                return Err(Error::parse(no, format!("{what} {v} does not fit {width}")));
            }
            Ok(v)
        })
        .collect::<Result<_>>()?;
    if out.len() != expected {
        return Err(Error::parse(
            no,
            format!("expected {expected} {what} values, found {}", out.len()),
        ));
    }
    Ok(out)
}

fn parse_values(line: &str, no: usize, scalar: ScalarWidth, expected: usize) -> Result<Vec<f64>> {
    let out: Vec<f64> = line
        .split_whitespace()
        .map(|t| {
            let bad = |_| Error::parse(no, format!("bad value `{t}`"));
            match scalar {
                ScalarWidth::F32 => t.parse::<f32>().map(f64::from).map_err(bad),
                _ => t.parse::<f64>().map_err(bad),
            }
        })
        .collect::<Result<_>>()?;
    if out.len() != expected {
        return Err(Error::parse(
            no,
            format!("expected {expected} values, found {}", out.len()),
        ));
    }
    Ok(out)
}

pub fn read_storage(source: impl BufRead) -> Result<StoredMatrix> {
    let mut lines = source.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (no, banner) = next_line(&mut lines, "banner")?;
    let words: Vec<&str> = banner.split_whitespace().collect();
    let format = match words.as_slice() {
        [b, kind, o, i, s] if *b == BANNER => {
            let spec: FormatSpec = format!("{kind}:{o}:{i}:{s}").parse()?;
            if !spec.scalar.is_executable() {
                return Err(Error::UnsupportedScalarWidth(spec.scalar));
            }
            spec
        }
        _ => {
            return Err(Error::parse(
                no,
                format!("expected `{BANNER} <csr|dacsr> <oindex> <iindex> <scalar>`"),
            ))
        }
    };

    let (no, size) = next_line(&mut lines, "size")?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| {
            t.parse()
                .map_err(|_| Error::parse(no, format!("bad size entry `{t}`")))
        })
        .collect::<Result<_>>()?;
    let [nrows, ncols, nnz] = dims[..] else {
        return Err(Error::parse(
            no,
            "size line must hold rows, columns and entries",
        ));
    };

    let (no, line) = next_line(&mut lines, "row pointer")?;
    let rowptr = parse_ints(&line, no, format.oindex, nrows + 1, "row pointer")?;
    let (no, line) = next_line(&mut lines, "index")?;
    let indices = parse_ints(&line, no, format.iindex, nnz, "index")?;
    let (no, line) = next_line(&mut lines, "value")?;
    let values = parse_values(&line, no, format.scalar, nnz)?;
    for (no, line) in lines {
        if !line?.trim().is_empty() {
            return Err(Error::parse(no, "trailing content"));
        }
    }

    Ok(StoredMatrix {
        format,
        nrows,
        ncols,
        rowptr,
        indices,
        values,
    })
}

pub fn read_storage_path(path: impl AsRef<Path>) -> Result<StoredMatrix> {
    read_storage(BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::write_converted;

    fn example() -> WideCsr {
        let t = crate::triplet::TripletMatrix::from_entries(
            4,
            4,
            vec![
                (0, 0, 1.0),
                (1, 2, 2.0),
                (2, 1, 3.0),
                (2, 3, 4.0),
                (3, 3, 5.0),
            ],
        )
        .unwrap();
        WideCsr::from_triplets(&t).unwrap()
    }

    #[test]
    fn dacsr_layout() {
        let a = example()
            .convert::<i32, i64, f64>()
            .unwrap()
            .to_dacsr::<i16>()
            .unwrap();
        let mut out = Vec::new();
        write_dacsr(&a, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(
            text,
            "%%SparseStorage dacsr i32 i16 f64\n4 4 5\n0 1 2 4 5\n0 1 -1 1 0\n1e0 2e0 3e0 4e0 5e0\n"
        );
        let back = read_storage(text.as_bytes()).unwrap();
        assert_eq!(back.indices, vec![0, 1, -1, 1, 0]);
        assert_eq!(back.to_wide_csr().unwrap(), example());
    }

    #[test]
    fn round_trips_every_format() {
        let base = example();
        for kind in [StorageKind::Csr, StorageKind::Dacsr] {
            for scalar in [ScalarWidth::F64, ScalarWidth::F32] {
                let spec = FormatSpec::new(kind, IndexWidth::W16, IndexWidth::W8, scalar);
                let mut out = Vec::new();
                write_converted(&base, &spec, &mut out).unwrap();
                let back = read_storage(out.as_slice()).unwrap();
                assert_eq!(back.format, spec);
                assert_eq!(back.to_wide_csr().unwrap(), base);
            }
        }
    }

    #[test]
    fn rejects_values_outside_declared_width() {
        let text = "%%SparseStorage dacsr i32 i8 f64\n1 300 1\n0 1\n200\n1e0\n";
        assert!(matches!(
            read_storage(text.as_bytes()),
            Err(Error::Parse { line: 4, .. })
        ));
    }

    #[test]
    fn rejects_invalid_structure() {
        // Offset points left of column 0.
        let text = "%%SparseStorage dacsr i32 i16 f64\n1 3 1\n0 1\n-1\n1e0\n";
        assert!(read_storage(text.as_bytes())
            .unwrap()
            .to_wide_csr()
            .is_err());
        let short = "%%SparseStorage csr i32 i32 f64\n2 2 1\n0 1\n0\n1e0\n";
        assert!(read_storage(short.as_bytes()).is_err());
        let f16 = "%%SparseStorage csr i32 i32 f16\n1 1 0\n0 0\n\n\n";
        assert!(matches!(
            read_storage(f16.as_bytes()),
            Err(Error::UnsupportedScalarWidth(_))
        ));
    }

    #[test]
    fn empty_matrix() {
        let a = WideCsr::empty(3, 2).unwrap();
        let mut out = Vec::new();
        write_csr(&a.convert::<i32, i32, f64>().unwrap(), &mut out).unwrap();
        let back = read_storage(out.as_slice()).unwrap();
        assert_eq!(back.to_wide_csr().unwrap(), a);
    }
}
