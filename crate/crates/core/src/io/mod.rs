//! Reading and writing matrices and result tables.

pub mod matrix_market;
pub mod results;
pub mod storage;

pub use matrix_market::{
    read_matrix_market, read_matrix_market_path, write_matrix_market, write_matrix_market_path,
};
pub use results::{read_results_csv, read_results_json, write_results, ResultFormat, ResultRecord};
pub use storage::{read_storage, read_storage_path, write_csr, write_dacsr, StoredMatrix};

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};
use crate::format::WideCsr;

/// Loads a Matrix Market or storage file, chosen by its first line.
pub fn read_any(path: impl AsRef<Path>) -> Result<WideCsr> {
    let mut reader = BufReader::new(File::open(path)?);
    let banner = reader.fill_buf()?;
    if banner.starts_with(b"%%SparseStorage") {
        read_storage(reader)?.to_wide_csr()
    } else if banner.len() >= 14 && banner[..14].eq_ignore_ascii_case(b"%%MatrixMarket") {
        WideCsr::from_triplets(&read_matrix_market(reader)?)
    } else {
        Err(Error::UnsupportedFormat(
            "expected a %%MatrixMarket or %%SparseStorage banner".into(),
        ))
    }
}
