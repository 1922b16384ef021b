//! Row-range kernels for `y <- alpha * A * x + beta * y`.
//!
//! Every kernel handles a contiguous block of rows and writes exactly the
//! matching block of `y`. Summation order within a row is fixed per variant,
//! and the CSR and DA-CSR versions of a variant share it, so both formats
//! produce bit-identical results for the same variant.

use std::ops::Range;

use crate::csr::CsrMatrix;
use crate::dacsr::DacsrMatrix;
use crate::width::{IndexType, Scalar};

use super::SerialVariant;

#[inline(always)]
fn finish<S: Scalar>(alpha: S, sum: S, beta: S, y: &mut S) {
    // beta == 0 never reads y, so NaN or garbage in the output buffer is fine
    *y = if beta == S::ZERO {
        alpha * sum
    } else {
        alpha * sum + beta * *y
    };
}

#[inline(always)]
fn sum3<S: Scalar>(acc: [S; 3]) -> S {
    (acc[0] + acc[1]) + acc[2]
}

#[inline(always)]
fn sum4<S: Scalar>(acc: [S; 4]) -> S {
    (acc[0] + acc[1]) + (acc[2] + acc[3])
}

/// Gathers `x` for one stored index. CSR and DA-CSR differ only here; the
/// accumulation loops below are generic over it.
trait Gather<S> {
    /// # Safety
    /// `idx` must address an element of the `x` this gatherer was built for.
    unsafe fn get(&self, idx: isize) -> S;
}

/// Absolute column indices into `x`.
struct Direct<'a, S>(&'a [S]);

impl<S: Scalar> Gather<S> for Direct<'_, S> {
    #[inline(always)]
    unsafe fn get(&self, idx: isize) -> S {
        *self.0.get_unchecked(idx as usize)
    }
}

/// Per-row base into `x`: `x + row`, dereferenced at `offset`.
///
/// The base itself may point outside `x` (tall matrices, or rows whose
/// entries sit left of the diagonal near the end); it is formed with
/// wrapping pointer arithmetic and only `base + offset`, always inside `x`,
/// is read.
struct Shifted<S>(*const S);

impl<S: Scalar> Gather<S> for Shifted<S> {
    #[inline(always)]
    unsafe fn get(&self, offset: isize) -> S {
        *self.0.wrapping_offset(offset)
    }
}

#[inline(always)]
unsafe fn row_sum_1<S: Scalar, I: IndexType>(g: &impl Gather<S>, idx: &[I], vals: &[S]) -> S {
    let mut sum = S::ZERO;
    for (i, &v) in idx.iter().zip(vals) {
        sum = sum + v * g.get(i.as_isize());
    }
    sum
}

#[inline(always)]
unsafe fn row_sum_3<S: Scalar, I: IndexType>(g: &impl Gather<S>, idx: &[I], vals: &[S]) -> S {
    let mut acc = [S::ZERO; 3];
    let mut ic = idx.chunks_exact(3);
    let mut vc = vals.chunks_exact(3);
    for (i, v) in (&mut ic).zip(&mut vc) {
        acc[0] = acc[0] + v[0] * g.get(i[0].as_isize());
        acc[1] = acc[1] + v[1] * g.get(i[1].as_isize());
        acc[2] = acc[2] + v[2] * g.get(i[2].as_isize());
    }
    // round-robin continues into the tail
    for (lane, (i, &v)) in ic.remainder().iter().zip(vc.remainder()).enumerate() {
        acc[lane] = acc[lane] + v * g.get(i.as_isize());
    }
    sum3(acc)
}

#[inline(always)]
unsafe fn row_sum_4<S: Scalar, I: IndexType>(g: &impl Gather<S>, idx: &[I], vals: &[S]) -> S {
    let mut acc = [S::ZERO; 4];
    let mut ic = idx.chunks_exact(4);
    let mut vc = vals.chunks_exact(4);
    for (i, v) in (&mut ic).zip(&mut vc) {
        let xs = [
            g.get(i[0].as_isize()),
            g.get(i[1].as_isize()),
            g.get(i[2].as_isize()),
            g.get(i[3].as_isize()),
        ];
        for lane in 0..4 {
            acc[lane] = acc[lane] + v[lane] * xs[lane];
        }
    }
    let mut sum = sum4(acc);
    for (i, &v) in ic.remainder().iter().zip(vc.remainder()) {
        sum = sum + v * g.get(i.as_isize());
    }
    sum
}

/// Bounds-checked absolute column indices.
struct Checked<'a, S>(&'a [S]);

impl<S: Scalar> Gather<S> for Checked<'_, S> {
    #[inline(always)]
    unsafe fn get(&self, idx: isize) -> S {
        self.0[idx as usize]
    }
}

/// Bounds-checked `row + offset`, one index addition per pattern entry.
struct RowRelative<'a, S> {
    x: &'a [S],
    row: isize,
}

impl<S: Scalar> Gather<S> for RowRelative<'_, S> {
    #[inline(always)]
    unsafe fn get(&self, offset: isize) -> S {
        self.x[(self.row + offset) as usize]
    }
}

#[inline(always)]
#[allow(clippy::too_many_arguments)]
fn drive<O, I, S, G>(
    rowptr: &[O],
    idx: &[I],
    values: &[S],
    rows: Range<usize>,
    alpha: S,
    beta: S,
    y: &mut [S],
    gather: impl Fn(usize) -> G,
    row_sum: impl Fn(&G, &[I], &[S]) -> S,
) where
    O: IndexType,
    I: IndexType,
    S: Scalar,
{
    for (r, yr) in rows.zip(y.iter_mut()) {
        let range = rowptr[r].as_usize()..rowptr[r + 1].as_usize();
        let sum = row_sum(&gather(r), &idx[range.clone()], &values[range]);
        finish(alpha, sum, beta, yr);
    }
}

/// CSR rows `rows`; `y` is the slice of the output for exactly those rows.
pub(crate) fn csr_rows<O: IndexType, I: IndexType, S: Scalar>(
    a: &CsrMatrix<O, I, S>,
    rows: Range<usize>,
    alpha: S,
    beta: S,
    x: &[S],
    y: &mut [S],
    variant: SerialVariant,
) {
    debug_assert_eq!(y.len(), rows.len());
    debug_assert_eq!(x.len(), a.ncols());
    let (rowptr, idx, vals) = (a.rowptr(), a.colids(), a.values());
    // SAFETY (all unchecked gathers): canonical CSR guarantees
    // 0 <= col < ncols = x.len()
    match variant {
        SerialVariant::Naive => drive(
            rowptr,
            idx,
            vals,
            rows,
            alpha,
            beta,
            y,
            |_| Checked(x),
            |g, i, v| unsafe { row_sum_1(g, i, v) },
        ),
        SerialVariant::ShiftedBase => drive(
            rowptr,
            idx,
            vals,
            rows,
            alpha,
            beta,
            y,
            |_| Direct(x),
            |g, i, v| unsafe { row_sum_1(g, i, v) },
        ),
        SerialVariant::MultiAccumulator3 => drive(
            rowptr,
            idx,
            vals,
            rows,
            alpha,
            beta,
            y,
            |_| Direct(x),
            |g, i, v| unsafe { row_sum_3(g, i, v) },
        ),
        SerialVariant::StripMined4 => drive(
            rowptr,
            idx,
            vals,
            rows,
            alpha,
            beta,
            y,
            |_| Direct(x),
            |g, i, v| unsafe { row_sum_4(g, i, v) },
        ),
    }
}

/// DA-CSR rows `rows`; `y` is the slice of the output for exactly those rows.
///
/// All variants except `Naive` compute one shifted base per row.
pub(crate) fn dacsr_rows<O: IndexType, I: IndexType, S: Scalar>(
    a: &DacsrMatrix<O, I, S>,
    rows: Range<usize>,
    alpha: S,
    beta: S,
    x: &[S],
    y: &mut [S],
    variant: SerialVariant,
) {
    debug_assert_eq!(y.len(), rows.len());
    debug_assert_eq!(x.len(), a.ncols());
    let (rowptr, idx, vals) = (a.rowptr(), a.colids(), a.values());
    let origin = x.as_ptr();
    let shifted = |r: usize| Shifted(origin.wrapping_add(r));
    // SAFETY (all shifted gathers): DA-CSR guarantees
    // 0 <= row + offset < ncols = x.len()
    match variant {
        SerialVariant::Naive => drive(
            rowptr,
            idx,
            vals,
            rows,
            alpha,
            beta,
            y,
            |r| RowRelative { x, row: r as isize },
            |g, i, v| unsafe { row_sum_1(g, i, v) },
        ),
        SerialVariant::ShiftedBase => drive(
            rowptr,
            idx,
            vals,
            rows,
            alpha,
            beta,
            y,
            shifted,
            |g, i, v| unsafe { row_sum_1(g, i, v) },
        ),
        SerialVariant::MultiAccumulator3 => drive(
            rowptr,
            idx,
            vals,
            rows,
            alpha,
            beta,
            y,
            shifted,
            |g, i, v| unsafe { row_sum_3(g, i, v) },
        ),
        SerialVariant::StripMined4 => drive(
            rowptr,
            idx,
            vals,
            rows,
            alpha,
            beta,
            y,
            shifted,
            |g, i, v| unsafe { row_sum_4(g, i, v) },
        ),
    }
}
