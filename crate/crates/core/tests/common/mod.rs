//! Shared fixtures: a dense reference product and random matrix builders.

#![allow(dead_code)]

use dacsr::{SerialVariant, SpmvVariant, TripletMatrix};
use rand::Rng;

/// Dense copy of a triplet list, duplicates summed.
pub fn dense(t: &TripletMatrix<f64>) -> Vec<Vec<f64>> {
    let mut d = vec![vec![0.0; t.ncols()]; t.nrows()];
    for &(r, c, v) in t.entries() {
        d[r][c] += v;
    }
    d
}

/// `alpha * D * x + beta * y0` by two nested loops, plus the per-row
/// magnitude `|alpha| * sum |d_rc x_c| + |beta y0_r|` for scaling tolerances.
pub fn dense_spmv(
    d: &[Vec<f64>],
    alpha: f64,
    beta: f64,
    x: &[f64],
    y0: &[f64],
) -> (Vec<f64>, Vec<f64>) {
    let mut y = Vec::with_capacity(d.len());
    let mut scale = Vec::with_capacity(d.len());
    for (r, row) in d.iter().enumerate() {
        let mut s = 0.0;
        let mut m = 0.0;
        for (c, &v) in row.iter().enumerate() {
            s += v * x[c];
            m += (v * x[c]).abs();
        }
        let old = if beta == 0.0 { 0.0 } else { beta * y0[r] };
        y.push(alpha * s + old);
        scale.push(alpha.abs() * m + old.abs());
    }
    (y, scale)
}

/// Random triplets: each position is filled with probability `density`, a
/// fifth of them with an explicit zero, and some positions repeated.
pub fn random_triplets(
    rng: &mut impl Rng,
    nrows: usize,
    ncols: usize,
    density: f64,
) -> TripletMatrix<f64> {
    let mut t = TripletMatrix::new(nrows, ncols);
    for r in 0..nrows {
        for c in 0..ncols {
            if rng.gen_bool(density) {
                let v = if rng.gen_bool(0.2) {
                    0.0
                } else {
                    rng.gen_range(-1.0..1.0)
                };
                t.push(r, c, v).unwrap();
                if rng.gen_bool(0.05) {
                    t.push(r, c, rng.gen_range(-1.0..1.0)).unwrap();
                }
            }
        }
    }
    t
}

pub fn random_vector(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// Every serial variant, plus each as the inner kernel of a parallel run with
/// each of `threads`.
pub fn all_variants(threads: &[usize]) -> Vec<SpmvVariant> {
    let mut out: Vec<SpmvVariant> = SerialVariant::ALL.iter().map(|&v| v.into()).collect();
    for &t in threads {
        for v in SerialVariant::ALL {
            out.push(SpmvVariant::parallel(t, v).unwrap());
        }
    }
    out
}

/// Brute-force bandwidth over a dense pattern of stored positions.
pub fn dense_bandwidth(t: &TripletMatrix<f64>) -> u64 {
    let mut stored = vec![vec![false; t.ncols()]; t.nrows()];
    for &(r, c, _) in t.entries() {
        stored[r][c] = true;
    }
    let mut w = 0;
    for (r, row) in stored.iter().enumerate() {
        for (c, &s) in row.iter().enumerate() {
            if s {
                w = w.max(r.abs_diff(c) as u64);
            }
        }
    }
    w
}
