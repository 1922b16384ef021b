use crate::error::{Error, Result};
use crate::width::Scalar;

/// Unordered `(row, col, value)` entries; the ingestion form of every matrix.
///
/// Duplicate positions are allowed and get summed when converting to CSR.
#[derive(Clone, Debug, PartialEq)]
pub struct TripletMatrix<S> {
    nrows: usize,
    ncols: usize,
    entries: Vec<(usize, usize, S)>,
}

impl<S: Scalar> TripletMatrix<S> {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        TripletMatrix {
            nrows,
            ncols,
            entries: Vec::new(),
        }
    }

    pub fn with_capacity(nrows: usize, ncols: usize, capacity: usize) -> Self {
        TripletMatrix {
            nrows,
            ncols,
            entries: Vec::with_capacity(capacity),
        }
    }

    pub fn from_entries(
        nrows: usize,
        ncols: usize,
        entries: Vec<(usize, usize, S)>,
    ) -> Result<Self> {
        if let Some(&(row, col, _)) = entries.iter().find(|&&(r, c, _)| r >= nrows || c >= ncols) {
            return Err(Error::EntryOutOfBounds {
                row,
                col,
                nrows,
                ncols,
            });
        }
        Ok(TripletMatrix {
            nrows,
            ncols,
            entries,
        })
    }

    pub fn push(&mut self, row: usize, col: usize, value: S) -> Result<()> {
        if row >= self.nrows || col >= self.ncols {
            return Err(Error::EntryOutOfBounds {
                row,
                col,
                nrows: self.nrows,
                ncols: self.ncols,
            });
        }
        self.entries.push((row, col, value));
        Ok(())
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Number of stored entries, duplicates included.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(usize, usize, S)] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<(usize, usize, S)> {
        self.entries
    }

    pub fn map_values<T: Scalar>(&self, f: impl Fn(S) -> T) -> TripletMatrix<T> {
        TripletMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            entries: self.entries.iter().map(|&(r, c, v)| (r, c, f(v))).collect(),
        }
    }
}
