//! Sparse matrix-vector product `y <- alpha * A * x + beta * y`.
//!
//! Follows the BLAS conventions for the scalars: with `beta == 0` the old
//! contents of `y` are never read, and with `alpha == 0` the matrix is not
//! touched and `y <- beta * y`.

mod kernels;

use std::collections::HashMap;
use std::fmt;
use std::ops::Range;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::{ThreadPool, ThreadPoolBuilder};

use crate::csr::CsrMatrix;
use crate::dacsr::DacsrMatrix;
use crate::error::{Error, Result};
use crate::width::{IndexType, Scalar};

/// Single-threaded kernel flavors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SerialVariant {
    /// Plain row loop. For DA-CSR the column is recomputed as
    /// `row + offset` for every entry.
    Naive,
    /// One base per row into `x`; entries are read at `base + offset`.
    /// For CSR the base is always `x` itself.
    ShiftedBase,
    /// Entries of a row distributed round-robin over 3 partial sums.
    MultiAccumulator3,
    /// Chunks of 4 entries into a 4-lane accumulator, horizontal sum at the
    /// end of the row, then a scalar tail.
    StripMined4,
}

impl SerialVariant {
    pub const ALL: [SerialVariant; 4] = [
        SerialVariant::Naive,
        SerialVariant::ShiftedBase,
        SerialVariant::MultiAccumulator3,
        SerialVariant::StripMined4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SerialVariant::Naive => "naive",
            SerialVariant::ShiftedBase => "shifted-base",
            SerialVariant::MultiAccumulator3 => "multi-acc-3",
            SerialVariant::StripMined4 => "strip-mined-4",
        }
    }
}

impl fmt::Display for SerialVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SerialVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SerialVariant::ALL
            .into_iter()
            .find(|v| v.name() == s.trim())
            .ok_or_else(|| Error::InvalidVariant(format!("unknown kernel `{s}`")))
    }
}

/// A kernel plus its threading. Parallel variants always wrap a serial one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SpmvVariant {
    Serial(SerialVariant),
    /// Rows split into `threads` contiguous blocks of roughly equal
    /// `nnz + rows`; each worker owns its slice of `y`.
    ParallelRowBlock {
        threads: usize,
        inner: SerialVariant,
    },
}

impl SpmvVariant {
    pub fn parallel(threads: usize, inner: SerialVariant) -> Result<Self> {
        if threads == 0 {
            return Err(Error::InvalidVariant(
                "thread count must be at least 1".into(),
            ));
        }
        Ok(SpmvVariant::ParallelRowBlock { threads, inner })
    }

    pub fn inner(self) -> SerialVariant {
        match self {
            SpmvVariant::Serial(v) => v,
            SpmvVariant::ParallelRowBlock { inner, .. } => inner,
        }
    }

    pub fn threads(self) -> usize {
        match self {
            SpmvVariant::Serial(_) => 1,
            SpmvVariant::ParallelRowBlock { threads, .. } => threads,
        }
    }
}

impl From<SerialVariant> for SpmvVariant {
    fn from(v: SerialVariant) -> Self {
        SpmvVariant::Serial(v)
    }
}

impl fmt::Display for SpmvVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpmvVariant::Serial(v) => write!(f, "{v}"),
            SpmvVariant::ParallelRowBlock { threads, inner } => {
                write!(f, "parallel:{threads}:{inner}")
            }
        }
    }
}

impl FromStr for SpmvVariant {
    type Err = Error;

    /// `naive`, `strip-mined-4`, or `parallel:<threads>:<serial kernel>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.strip_prefix("parallel:") {
            None => s.parse().map(SpmvVariant::Serial),
            Some(rest) => {
                let (threads, inner) = rest.split_once(':').ok_or_else(|| {
                    Error::InvalidVariant(format!(
                        "expected parallel:<threads>:<kernel>, got `{s}`"
                    ))
                })?;
                if inner.starts_with("parallel") {
                    return Err(Error::InvalidVariant(
                        "parallel variants cannot be nested".into(),
                    ));
                }
                let threads = threads
                    .parse()
                    .map_err(|_| Error::InvalidVariant(format!("bad thread count `{threads}`")))?;
                SpmvVariant::parallel(threads, inner.parse()?)
            }
        }
    }
}

/// Scalars and vectors of one product.
#[derive(Debug)]
pub struct SpmvProblem<'a, S> {
    pub alpha: S,
    pub beta: S,
    pub x: &'a [S],
    pub y: &'a mut [S],
}

impl<'a, S: Scalar> SpmvProblem<'a, S> {
    pub fn new(alpha: S, beta: S, x: &'a [S], y: &'a mut [S]) -> Self {
        SpmvProblem { alpha, beta, x, y }
    }
}

/// A matrix the SpMV driver can run on. Object safe, so benchmark code can
/// hold matrices of different widths behind one pointer.
pub trait SparseMatVec<S: Scalar>: Sync {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;
    fn nnz(&self) -> usize;

    /// Index of the first entry of row `r`, for `r` in `0..=nrows`.
    fn row_start(&self, r: usize) -> usize;

    /// Computes rows `rows` into `y`, which holds exactly those rows.
    fn spmv_rows(
        &self,
        rows: Range<usize>,
        alpha: S,
        beta: S,
        x: &[S],
        y: &mut [S],
        variant: SerialVariant,
    );
}

impl<O: IndexType, I: IndexType, S: Scalar> SparseMatVec<S> for CsrMatrix<O, I, S> {
    fn nrows(&self) -> usize {
        CsrMatrix::nrows(self)
    }

    fn ncols(&self) -> usize {
        CsrMatrix::ncols(self)
    }

    fn nnz(&self) -> usize {
        CsrMatrix::nnz(self)
    }

    fn row_start(&self, r: usize) -> usize {
        self.rowptr()[r].as_usize()
    }

    fn spmv_rows(
        &self,
        rows: Range<usize>,
        alpha: S,
        beta: S,
        x: &[S],
        y: &mut [S],
        variant: SerialVariant,
    ) {
        kernels::csr_rows(self, rows, alpha, beta, x, y, variant)
    }
}

impl<O: IndexType, I: IndexType, S: Scalar> SparseMatVec<S> for DacsrMatrix<O, I, S> {
    fn nrows(&self) -> usize {
        DacsrMatrix::nrows(self)
    }

    fn ncols(&self) -> usize {
        DacsrMatrix::ncols(self)
    }

    fn nnz(&self) -> usize {
        DacsrMatrix::nnz(self)
    }

    fn row_start(&self, r: usize) -> usize {
        self.rowptr()[r].as_usize()
    }

    fn spmv_rows(
        &self,
        rows: Range<usize>,
        alpha: S,
        beta: S,
        x: &[S],
        y: &mut [S],
        variant: SerialVariant,
    ) {
        kernels::dacsr_rows(self, rows, alpha, beta, x, y, variant)
    }
}

/// Floating-point operations of one product: `2 nnz + 2 nrows`.
pub fn work_flops(nrows: usize, nnz: usize) -> u64 {
    2 * nnz as u64 + 2 * nrows as u64
}

/// Splits `0..nrows` into `parts` contiguous blocks with about equal
/// `entries + rows` each. Returns `parts + 1` boundaries.
pub fn partition_rows<S: Scalar>(a: &(impl SparseMatVec<S> + ?Sized), parts: usize) -> Vec<usize> {
    let n = a.nrows();
    let parts = parts.max(1);
    let total = a.nnz() + n;
    let mut bounds = Vec::with_capacity(parts + 1);
    bounds.push(0);
    for t in 1..parts {
        let target = total * t / parts;
        let lo = *bounds.last().unwrap();
        // first row r whose prefix weight row_start(r) + r reaches the target
        let (mut l, mut h) = (lo, n);
        while l < h {
            let mid = l + (h - l) / 2;
            if a.row_start(mid) + mid < target {
                l = mid + 1;
            } else {
                h = mid;
            }
        }
        bounds.push(l);
    }
    bounds.push(n);
    bounds
}

fn pool(threads: usize) -> Arc<ThreadPool> {
    static POOLS: OnceLock<Mutex<HashMap<usize, Arc<ThreadPool>>>> = OnceLock::new();
    let mut pools = POOLS.get_or_init(Default::default).lock().unwrap();
    pools
        .entry(threads)
        .or_insert_with(|| {
            Arc::new(
                ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .thread_name(move |i| format!("spmv-{threads}-{i}"))
                    .build()
                    .expect("spawning SpMV worker threads"),
            )
        })
        .clone()
}

/// Runs one product on any supported matrix.
pub fn spmv<S: Scalar>(
    a: &(impl SparseMatVec<S> + ?Sized),
    p: SpmvProblem<'_, S>,
    variant: SpmvVariant,
) -> Result<()> {
    if p.x.len() != a.ncols() || p.y.len() != a.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix with x of length {} and y of length {}",
            a.nrows(),
            a.ncols(),
            p.x.len(),
            p.y.len()
        )));
    }
    let SpmvProblem { alpha, beta, x, y } = p;
    if alpha == S::ZERO {
        for v in y.iter_mut() {
            *v = if beta == S::ZERO { S::ZERO } else { beta * *v };
        }
        return Ok(());
    }
    match variant {
        SpmvVariant::Serial(v) => a.spmv_rows(0..a.nrows(), alpha, beta, x, y, v),
        SpmvVariant::ParallelRowBlock { threads, inner } => {
            if threads == 0 {
                return Err(Error::InvalidVariant(
                    "thread count must be at least 1".into(),
                ));
            }
            let bounds = partition_rows(a, threads);
            let workers = pool(threads);
            workers.scope(|s| {
                let mut rest = y;
                for w in bounds.windows(2) {
                    let (block, tail) = rest.split_at_mut(w[1] - w[0]);
                    rest = tail;
                    let rows = w[0]..w[1];
                    s.spawn(move |_| a.spmv_rows(rows, alpha, beta, x, block, inner));
                }
            });
        }
    }
    Ok(())
}

/// [`spmv`] on a CSR matrix.
pub fn spmv_csr<O: IndexType, I: IndexType, S: Scalar>(
    a: &CsrMatrix<O, I, S>,
    p: SpmvProblem<'_, S>,
    variant: SpmvVariant,
) -> Result<()> {
    spmv(a, p, variant)
}

/// [`spmv`] on a DA-CSR matrix.
pub fn spmv_dacsr<O: IndexType, I: IndexType, S: Scalar>(
    a: &DacsrMatrix<O, I, S>,
    p: SpmvProblem<'_, S>,
    variant: SpmvVariant,
) -> Result<()> {
    spmv(a, p, variant)
}
