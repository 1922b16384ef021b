//! Diagonally-addressed CSR: column indices stored relative to the diagonal.
//!
//! Entry `i` in row `r` at column `c` stores `c - r`. The offsets of a matrix
//! with bandwidth `w` lie in `[-w, w]`, independent of the matrix dimension,
//! so a narrow signed type usually suffices after bandwidth reduction.

use crate::csr::{check_ncols, check_rowptr, Bandwidth, CsrMatrix};
use crate::error::{Error, Result};
use crate::width::{IndexType, Scalar};

/// DA-CSR matrix. Same row pointers and values as the CSR it came from;
/// `offsets[i] = col_i - row_i`, strictly increasing within each row, and
/// `0 <= row + offset < ncols` for every entry.
#[derive(Clone, Debug, PartialEq)]
pub struct DacsrMatrix<O, I, S> {
    nrows: usize,
    ncols: usize,
    rowptr: Vec<O>,
    offsets: Vec<I>,
    values: Vec<S>,
}

impl<O: IndexType, I: IndexType, S: Scalar> DacsrMatrix<O, I, S> {
    pub fn from_raw(
        nrows: usize,
        ncols: usize,
        rowptr: Vec<O>,
        offsets: Vec<I>,
        values: Vec<S>,
    ) -> Result<Self> {
        if offsets.len() != values.len() {
            return Err(Error::InvalidStructure(format!(
                "{} offsets but {} values",
                offsets.len(),
                values.len()
            )));
        }
        check_rowptr(nrows, &rowptr, offsets.len())?;
        for r in 0..nrows {
            let row = &offsets[rowptr[r].as_usize()..rowptr[r + 1].as_usize()];
            for &o in row {
                let col = r as isize + o.as_isize();
                if col < 0 || col as usize >= ncols {
                    return Err(Error::InvalidStructure(format!(
                        "offset {o} in row {r} addresses column {col} outside [0, {ncols})"
                    )));
                }
            }
            if row.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidStructure(format!(
                    "offsets of row {r} are not strictly increasing"
                )));
            }
        }
        Ok(DacsrMatrix {
            nrows,
            ncols,
            rowptr,
            offsets,
            values,
        })
    }

    pub(crate) fn from_parts_unchecked(
        nrows: usize,
        ncols: usize,
        rowptr: Vec<O>,
        offsets: Vec<I>,
        values: Vec<S>,
    ) -> Self {
        debug_assert_eq!(rowptr.len(), nrows + 1);
        debug_assert_eq!(offsets.len(), values.len());
        DacsrMatrix {
            nrows,
            ncols,
            rowptr,
            offsets,
            values,
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn rowptr(&self) -> &[O] {
        &self.rowptr
    }

    /// The stored `col - row` offsets.
    pub fn colids(&self) -> &[I] {
        &self.offsets
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    #[inline]
    pub fn row_range(&self, r: usize) -> std::ops::Range<usize> {
        self.rowptr[r].as_usize()..self.rowptr[r + 1].as_usize()
    }

    pub fn row(&self, r: usize) -> (&[I], &[S]) {
        let range = self.row_range(r);
        (&self.offsets[range.clone()], &self.values[range])
    }

    pub fn bandwidth(&self) -> Bandwidth {
        Bandwidth(
            self.offsets
                .iter()
                .map(|o| o.as_isize().unsigned_abs() as u64)
                .max()
                .unwrap_or(0),
        )
    }

    /// Translates offsets back to absolute column indices of type `I2`.
    pub fn to_csr<I2: IndexType>(&self) -> Result<CsrMatrix<O, I2, S>> {
        check_ncols::<I2>(self.ncols)?;
        let mut colids = Vec::with_capacity(self.nnz());
        for r in 0..self.nrows {
            let base = r as isize;
            colids.extend(
                self.row(r)
                    .0
                    .iter()
                    .map(|o| I2::try_from_isize(base + o.as_isize()).unwrap()),
            );
        }
        Ok(CsrMatrix::from_parts_unchecked(
            self.nrows,
            self.ncols,
            self.rowptr.clone(),
            colids,
            self.values.clone(),
        ))
    }
}
