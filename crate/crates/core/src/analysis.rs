//! Whether a matrix fits narrow column indices, with and without reordering.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::WideCsr;
use crate::io::results::ResultFormat;
use crate::reorder::{permute_symmetric, rcm};
use crate::width::IndexWidth;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisRecord {
    pub matrix_name: String,
    pub nrows: usize,
    pub ncols: usize,
    pub nnz: usize,
    pub bandwidth: u64,
    /// Bandwidth after symmetric RCM reordering; the original bandwidth for
    /// non-square matrices, which are not reordered.
    pub rcm_bandwidth: u64,
    pub index_bits: u32,
    /// Plain CSR column indices fit: `ncols <= 2^(k-1)`.
    pub fits_csr: bool,
    /// DA offsets fit after reordering: `rcm_bandwidth <= 2^(k-1) - 1`.
    pub fits_dacsr: bool,
}

pub fn analyze(name: &str, a: &WideCsr, width: IndexWidth) -> Result<AnalysisRecord> {
    let bandwidth = a.bandwidth();
    let rcm_bandwidth = if a.is_square() {
        permute_symmetric(a, &rcm(a)?)?.bandwidth()
    } else {
        bandwidth
    };
    Ok(AnalysisRecord {
        matrix_name: name.to_string(),
        nrows: a.nrows(),
        ncols: a.ncols(),
        nnz: a.nnz(),
        bandwidth: bandwidth.0,
        rcm_bandwidth: rcm_bandwidth.0,
        index_bits: width.bits(),
        fits_csr: a.ncols() as u64 <= width.max_value() + 1,
        fits_dacsr: rcm_bandwidth.fits(width),
    })
}

/// Counts over a set of records: `(total, fits_csr, fits_dacsr)`.
pub fn summarize(records: &[AnalysisRecord]) -> (usize, usize, usize) {
    (
        records.len(),
        records.iter().filter(|r| r.fits_csr).count(),
        records.iter().filter(|r| r.fits_dacsr).count(),
    )
}

pub fn write_analysis(
    records: &[AnalysisRecord],
    sink: impl Write,
    format: ResultFormat,
) -> Result<()> {
    match format {
        ResultFormat::Csv => {
            let mut w = csv::Writer::from_writer(sink);
            for r in records {
                w.serialize(r)
                    .map_err(|e| Error::Config(format!("csv: {e}")))?;
            }
            if records.is_empty() {
                w.write_record([
                    "matrix_name",
                    "nrows",
                    "ncols",
                    "nnz",
                    "bandwidth",
                    "rcm_bandwidth",
                    "index_bits",
                    "fits_csr",
                    "fits_dacsr",
                ])
                .map_err(|e| Error::Config(format!("csv: {e}")))?;
            }
            w.flush()?;
        }
        ResultFormat::Json => {
            let mut sink = sink;
            serde_json::to_writer_pretty(&mut sink, records)
                .map_err(|e| Error::Config(format!("json: {e}")))?;
            writeln!(sink)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{arrow, random_banded, scramble, tridiagonal};

    #[test]
    fn tridiagonal_fits_both() {
        let r = analyze("t", &tridiagonal(100), IndexWidth::W16).unwrap();
        assert_eq!((r.bandwidth, r.rcm_bandwidth), (1, 1));
        assert!(r.fits_csr && r.fits_dacsr);
    }

    #[test]
    fn csr_limit_is_inclusive() {
        let r = analyze("a", &tridiagonal(128), IndexWidth::W8).unwrap();
        assert!(r.fits_csr);
        let r = analyze("a", &tridiagonal(129), IndexWidth::W8).unwrap();
        assert!(!r.fits_csr && r.fits_dacsr);
    }

    #[test]
    fn scrambled_band_fits_after_reordering() {
        let (s, _) = scramble(&random_banded(40_000, 4, 0.3, 3), 8).unwrap();
        let r = analyze("s", &s, IndexWidth::W16).unwrap();
        assert!(r.bandwidth > 32767);
        assert!(r.rcm_bandwidth <= 8);
        assert!(r.fits_dacsr && !r.fits_csr);
    }

    #[test]
    fn arrow_fits_neither() {
        let r = analyze("arrow", &arrow(70_000), IndexWidth::W16).unwrap();
        assert!(r.rcm_bandwidth > 32767);
        assert!(!r.fits_csr && !r.fits_dacsr);
        assert_eq!(summarize(&[r]), (1, 0, 0));
    }

    #[test]
    fn non_square_is_not_reordered() {
        let a = crate::gen::random_sparse(5, 9, 0.5, 1);
        let r = analyze("w", &a, IndexWidth::W8).unwrap();
        assert_eq!(r.bandwidth, r.rcm_bandwidth);
    }
}
