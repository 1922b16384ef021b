//! Compressed sparse row storage with configurable index and scalar widths.

use std::fmt;

use crate::dacsr::DacsrMatrix;
use crate::error::{Error, Result};
use crate::triplet::TripletMatrix;
use crate::width::{IndexType, IndexWidth, Scalar};

/// Matrix bandwidth: the largest `|c - r|` over all pattern entries.
///
/// Empty matrices have bandwidth 0.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bandwidth(pub u64);

impl Bandwidth {
    /// Whether every offset in `[-w, w]` is representable in `width`.
    pub fn fits(self, width: IndexWidth) -> bool {
        self.0 <= width.max_value()
    }
}

impl fmt::Display for Bandwidth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// CSR matrix in canonical form.
///
/// `O` is the row pointer type, `I` the column index type and `S` the scalar.
/// Canonical form means `rowptr[0] = 0`, `rowptr[nrows] = nnz`, rows
/// non-decreasing and column indices strictly increasing within each row.
/// Explicitly stored zeros are pattern entries like any other.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix<O, I, S> {
    nrows: usize,
    ncols: usize,
    rowptr: Vec<O>,
    colids: Vec<I>,
    values: Vec<S>,
}

pub(crate) fn check_nnz<O: IndexType>(nnz: usize) -> Result<()> {
    if O::try_from_usize(nnz).is_none() {
        return Err(Error::IndexRangeExceeded {
            what: "nnz",
            value: nnz as u64,
            width: O::WIDTH,
        });
    }
    Ok(())
}

pub(crate) fn check_ncols<I: IndexType>(ncols: usize) -> Result<()> {
    if ncols > 0 && I::try_from_usize(ncols - 1).is_none() {
        return Err(Error::IndexRangeExceeded {
            what: "ncols - 1",
            value: (ncols - 1) as u64,
            width: I::WIDTH,
        });
    }
    Ok(())
}

pub(crate) fn check_rowptr<O: IndexType>(nrows: usize, rowptr: &[O], nnz: usize) -> Result<()> {
    if rowptr.len() != nrows + 1 {
        return Err(Error::InvalidStructure(format!(
            "rowptr has length {}, expected {}",
            rowptr.len(),
            nrows + 1
        )));
    }
    if rowptr[0].as_isize() != 0 {
        return Err(Error::InvalidStructure("rowptr[0] must be 0".into()));
    }
    if rowptr[nrows].as_isize() != nnz as isize {
        return Err(Error::InvalidStructure(format!(
            "rowptr[{nrows}] = {} but nnz = {nnz}",
            rowptr[nrows]
        )));
    }
    if rowptr.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidStructure(
            "rowptr is not non-decreasing".into(),
        ));
    }
    Ok(())
}

impl<O: IndexType, I: IndexType, S: Scalar> CsrMatrix<O, I, S> {
    /// An `nrows x ncols` matrix without entries.
    pub fn empty(nrows: usize, ncols: usize) -> Result<Self> {
        check_ncols::<I>(ncols)?;
        Ok(CsrMatrix {
            nrows,
            ncols,
            rowptr: vec![O::try_from_usize(0).unwrap(); nrows + 1],
            colids: Vec::new(),
            values: Vec::new(),
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        check_nnz::<O>(n)?;
        check_ncols::<I>(n)?;
        Ok(CsrMatrix {
            nrows: n,
            ncols: n,
            rowptr: (0..=n).map(|i| O::try_from_usize(i).unwrap()).collect(),
            colids: (0..n).map(|i| I::try_from_usize(i).unwrap()).collect(),
            values: vec![S::ONE; n],
        })
    }

    /// Builds canonical CSR from triplets: rows sorted, duplicates summed in
    /// input order, explicit zeros kept.
    pub fn from_triplets(t: &TripletMatrix<S>) -> Result<Self> {
        let (nrows, ncols) = (t.nrows(), t.ncols());
        check_ncols::<I>(ncols)?;
        for &(row, col, _) in t.entries() {
            if row >= nrows || col >= ncols {
                return Err(Error::EntryOutOfBounds {
                    row,
                    col,
                    nrows,
                    ncols,
                });
            }
        }

        let mut order: Vec<usize> = (0..t.len()).collect();
        let entries = t.entries();
        // stable: duplicates accumulate in input order
        order.sort_by_key(|&k| (entries[k].0, entries[k].1));

        let mut counts = vec![0usize; nrows + 1];
        let mut colids = Vec::with_capacity(order.len());
        let mut values: Vec<S> = Vec::with_capacity(order.len());
        let mut last: Option<(usize, usize)> = None;
        for k in order {
            let (r, c, v) = entries[k];
            if last == Some((r, c)) {
                let tail = values.last_mut().unwrap();
                *tail = *tail + v;
            } else {
                colids.push(c);
                values.push(v);
                counts[r + 1] += 1;
                last = Some((r, c));
            }
        }
        check_nnz::<O>(values.len())?;
        for r in 0..nrows {
            counts[r + 1] += counts[r];
        }

        Ok(CsrMatrix {
            nrows,
            ncols,
            rowptr: counts
                .into_iter()
                .map(|p| O::try_from_usize(p).unwrap())
                .collect(),
            colids: colids
                .into_iter()
                .map(|c| I::try_from_usize(c).unwrap())
                .collect(),
            values,
        })
    }

    /// Validates raw arrays against the canonical-form invariants.
    pub fn from_raw(
        nrows: usize,
        ncols: usize,
        rowptr: Vec<O>,
        colids: Vec<I>,
        values: Vec<S>,
    ) -> Result<Self> {
        if colids.len() != values.len() {
            return Err(Error::InvalidStructure(format!(
                "{} column indices but {} values",
                colids.len(),
                values.len()
            )));
        }
        check_rowptr(nrows, &rowptr, colids.len())?;
        for r in 0..nrows {
            let row = &colids[rowptr[r].as_usize()..rowptr[r + 1].as_usize()];
            if let Some(&c) = row
                .iter()
                .find(|c| c.as_isize() < 0 || c.as_usize() >= ncols)
            {
                return Err(Error::EntryOutOfBounds {
                    row: r,
                    col: c.as_isize() as usize,
                    nrows,
                    ncols,
                });
            }
            if row.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidStructure(format!(
                    "columns of row {r} are not strictly increasing"
                )));
            }
        }
        Ok(CsrMatrix {
            nrows,
            ncols,
            rowptr,
            colids,
            values,
        })
    }

    pub(crate) fn from_parts_unchecked(
        nrows: usize,
        ncols: usize,
        rowptr: Vec<O>,
        colids: Vec<I>,
        values: Vec<S>,
    ) -> Self {
        debug_assert_eq!(rowptr.len(), nrows + 1);
        debug_assert_eq!(colids.len(), values.len());
        CsrMatrix {
            nrows,
            ncols,
            rowptr,
            colids,
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

    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    pub fn rowptr(&self) -> &[O] {
        &self.rowptr
    }

    pub fn colids(&self) -> &[I] {
        &self.colids
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn into_parts(self) -> (Vec<O>, Vec<I>, Vec<S>) {
        (self.rowptr, self.colids, self.values)
    }

    /// Entry range of row `r` within `colids`/`values`.
    #[inline]
    pub fn row_range(&self, r: usize) -> std::ops::Range<usize> {
        self.rowptr[r].as_usize()..self.rowptr[r + 1].as_usize()
    }

    pub fn row(&self, r: usize) -> (&[I], &[S]) {
        let range = self.row_range(r);
        (&self.colids[range.clone()], &self.values[range])
    }

    /// All pattern entries as `(row, col, value)` in storage order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, S)> + '_ {
        (0..self.nrows).flat_map(move |r| {
            let (cols, vals) = self.row(r);
            cols.iter()
                .zip(vals)
                .map(move |(&c, &v)| (r, c.as_usize(), v))
        })
    }

    pub fn to_triplets(&self) -> TripletMatrix<S> {
        TripletMatrix::from_entries(self.nrows, self.ncols, self.iter().collect())
            .expect("canonical CSR entries are in range")
    }

    pub fn bandwidth(&self) -> Bandwidth {
        Bandwidth(
            self.iter()
                .map(|(r, c, _)| r.abs_diff(c) as u64)
                .max()
                .unwrap_or(0),
        )
    }

    /// Re-stores the matrix with different widths. Values are cast through
    /// `f64`, so narrowing to `f32` rounds.
    pub fn convert<O2: IndexType, I2: IndexType, S2: Scalar>(
        &self,
    ) -> Result<CsrMatrix<O2, I2, S2>> {
        check_nnz::<O2>(self.nnz())?;
        check_ncols::<I2>(self.ncols)?;
        Ok(CsrMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            rowptr: self
                .rowptr
                .iter()
                .map(|p| O2::try_from_isize(p.as_isize()).unwrap())
                .collect(),
            colids: self
                .colids
                .iter()
                .map(|c| I2::try_from_isize(c.as_isize()).unwrap())
                .collect(),
            values: self
                .values
                .iter()
                .map(|v| S2::from_f64(v.to_f64()))
                .collect(),
        })
    }

    /// Diagonally-addressed copy: column indices become `col - row` stored in `I2`.
    ///
    /// Fails when the bandwidth exceeds `2^(k-1) - 1` for a `k`-bit `I2`.
    pub fn to_dacsr<I2: IndexType>(&self) -> Result<DacsrMatrix<O, I2, S>> {
        let w = self.bandwidth();
        if !w.fits(I2::WIDTH) {
            return Err(Error::BandwidthExceedsIndexRange {
                bandwidth: w.0,
                width: I2::WIDTH,
            });
        }
        let mut offsets = Vec::with_capacity(self.nnz());
        for r in 0..self.nrows {
            let base = r as isize;
            offsets.extend(
                self.row(r)
                    .0
                    .iter()
                    .map(|c| I2::try_from_isize(c.as_isize() - base).unwrap()),
            );
        }
        Ok(DacsrMatrix::from_parts_unchecked(
            self.nrows,
            self.ncols,
            self.rowptr.clone(),
            offsets,
            self.values.clone(),
        ))
    }
}
