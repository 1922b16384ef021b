//! Synthetic test and benchmark matrices.
//!
//! All generators are deterministic in their seed.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bench::NamedMatrix;
use crate::csr::{check_ncols, check_nnz, CsrMatrix};
use crate::error::{Error, Result};
use crate::format::WideCsr;
use crate::reorder::{permute_symmetric, Permutation};
use crate::triplet::TripletMatrix;
use crate::width::{IndexType, Scalar};

/// The 1D Laplacian: 2 on the diagonal, -1 beside it.
pub fn tridiagonal(n: usize) -> WideCsr {
    banded_with(n, 1, |r, c| if r == c { 2.0 } else { -1.0 }).expect("i64 indices hold any size")
}

/// Every entry within `half_width` of the diagonal, built row by row without
/// a triplet stage. Values depend only on the distance from the diagonal.
pub fn full_band<O: IndexType, I: IndexType, S: Scalar>(
    n: usize,
    half_width: usize,
) -> Result<CsrMatrix<O, I, S>> {
    banded_with(n, half_width, |r, c| 1.0 / (1.0 + r.abs_diff(c) as f64))
}

fn banded_with<O: IndexType, I: IndexType, S: Scalar>(
    n: usize,
    half_width: usize,
    value: impl Fn(usize, usize) -> f64,
) -> Result<CsrMatrix<O, I, S>> {
    check_ncols::<I>(n)?;
    let row_len = |r: usize| r.min(half_width) + (n - 1 - r).min(half_width) + 1;
    let nnz: usize = if n == 0 { 0 } else { (0..n).map(row_len).sum() };
    check_nnz::<O>(nnz)?;
    let mut rowptr = Vec::with_capacity(n + 1);
    let mut colids = Vec::with_capacity(nnz);
    let mut values = Vec::with_capacity(nnz);
    rowptr.push(O::try_from_usize(0).unwrap());
    for r in 0..n {
        for c in r.saturating_sub(half_width)..=(r + half_width).min(n - 1) {
            colids.push(I::try_from_usize(c).unwrap());
            values.push(S::from_f64(value(r, c)));
        }
        rowptr.push(O::try_from_usize(colids.len()).unwrap());
    }
    Ok(CsrMatrix::from_parts_unchecked(
        n, n, rowptr, colids, values,
    ))
}

/// Symmetric pattern with bandwidth exactly `bandwidth` (for `n > bandwidth`).
///
/// The diagonal and first off-diagonals are always present, so the graph is
/// connected; `(bandwidth, 0)` and `(0, bandwidth)` pin the bandwidth; other
/// in-band positions are filled with probability `density`.
pub fn random_banded(n: usize, bandwidth: usize, density: f64, seed: u64) -> WideCsr {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = TripletMatrix::new(n, n);
    let sym = |t: &mut TripletMatrix<f64>, r: usize, c: usize, v: f64| {
        t.push(r, c, v).unwrap();
        if r != c {
            t.push(c, r, v).unwrap();
        }
    };
    for r in 0..n {
        sym(&mut t, r, r, 4.0 + rng.gen::<f64>());
        for d in 1..=bandwidth.min(r) {
            let pinned = r == bandwidth && d == bandwidth;
            if d == 1 || pinned || rng.gen_bool(density.clamp(0.0, 1.0)) {
                sym(&mut t, r, r - d, rng.gen_range(-1.0..1.0));
            }
        }
    }
    WideCsr::from_triplets(&t).expect("generated entries are in bounds")
}

/// `P A P^T` for a uniformly random `P`.
pub fn scramble(a: &WideCsr, seed: u64) -> Result<(WideCsr, Permutation)> {
    let mut perm: Vec<usize> = (0..a.nrows()).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let p = Permutation::from_vec(perm)?;
    Ok((permute_symmetric(a, &p)?, p))
}

/// Diagonal plus a full first row and column: bandwidth `n - 1` that no
/// reordering can reduce below about `n / 2`.
pub fn arrow(n: usize) -> WideCsr {
    let mut t = TripletMatrix::new(n, n);
    for i in 0..n {
        t.push(i, i, 2.0).unwrap();
        if i > 0 {
            t.push(0, i, 1.0).unwrap();
            t.push(i, 0, 1.0).unwrap();
        }
    }
    WideCsr::from_triplets(&t).unwrap()
}

/// Uniformly random pattern of the given density with values in `[-1, 1)`.
pub fn random_sparse(nrows: usize, ncols: usize, density: f64, seed: u64) -> WideCsr {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = TripletMatrix::new(nrows, ncols);
    for r in 0..nrows {
        for c in 0..ncols {
            if rng.gen_bool(density.clamp(0.0, 1.0)) {
                t.push(r, c, rng.gen_range(-1.0..1.0)).unwrap();
            }
        }
    }
    WideCsr::from_triplets(&t).unwrap()
}

/// Parses a generator description:
///
/// * `tridiag:N`
/// * `band:N:W` (every entry within `W` of the diagonal)
/// * `banded:N:B[:SEED]` (random, bandwidth exactly `B`)
/// * `scrambled:N:B[:SEED]` (`banded` under a random symmetric permutation)
/// * `arrow:N`
/// * `random:R:C:DENSITY[:SEED]`
pub fn generate(spec: &str) -> Result<NamedMatrix> {
    let parts: Vec<&str> = spec.trim().split(':').collect();
    let bad = || Error::Config(format!("bad generator `{spec}`"));
    let int =
        |i: usize| -> Result<usize> { parts.get(i).ok_or_else(bad)?.parse().map_err(|_| bad()) };
    let seed =
        |i: usize| -> Result<u64> { parts.get(i).map_or(Ok(1), |s| s.parse().map_err(|_| bad())) };
    let arity = |lo: usize, hi: usize| {
        if (lo..=hi).contains(&parts.len()) {
            Ok(())
        } else {
            Err(bad())
        }
    };
    let matrix = match parts[0] {
        "tridiag" => {
            arity(2, 2)?;
            tridiagonal(int(1)?)
        }
        "band" => {
            arity(3, 3)?;
            full_band(int(1)?, int(2)?)?
        }
        "banded" | "scrambled" => {
            arity(3, 4)?;
            let (n, b) = (int(1)?, int(2)?);
            let a = random_banded(n, b, 0.3, seed(3)?);
            if parts[0] == "banded" {
                a
            } else {
                scramble(&a, seed(3)?.wrapping_add(1))?.0
            }
        }
        "arrow" => {
            arity(2, 2)?;
            arrow(int(1)?)
        }
        "random" => {
            arity(4, 5)?;
            let density: f64 = parts[3].parse().map_err(|_| bad())?;
            random_sparse(int(1)?, int(2)?, density, seed(4)?)
        }
        _ => return Err(bad()),
    };
    Ok(NamedMatrix::new(spec.trim().replace(':', "-"), matrix))
}
