//! Traffic, work and speedup model for memory-bound SpMV.
//!
//! A memory-bound kernel runs at a fixed byte rate, so the performance ratio
//! of two storage layouts is the inverse of their traffic ratio. Matrix
//! traffic is `(nrows + 1) * oindex + nnz * (iindex + scalar)` bytes; SpMV
//! traffic adds one read of `x` and one of `y`. Speedups are exact rationals.

use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::width::{IndexWidth, ScalarWidth};

pub const MIB: f64 = (1u64 << 20) as f64;

/// Exact speedup or traffic ratio.
pub type Rational = Ratio<u128>;

/// Bytes per stored element of each array.
///
/// A zero `oindex_bytes` drops row-pointer traffic (the per-nonzero
/// approximation); zero `iindex_bytes` as well models dense storage.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StorageWidths {
    pub oindex_bytes: u64,
    pub iindex_bytes: u64,
    pub scalar_bytes: u64,
}

impl StorageWidths {
    pub fn new(oindex: IndexWidth, iindex: IndexWidth, scalar: ScalarWidth) -> Self {
        StorageWidths {
            oindex_bytes: oindex.bytes(),
            iindex_bytes: iindex.bytes(),
            scalar_bytes: scalar.bytes(),
        }
    }

    /// Row pointers ignored. `iindex = None` means dense storage.
    pub fn per_nonzero(iindex: Option<IndexWidth>, scalar: ScalarWidth) -> Self {
        StorageWidths {
            oindex_bytes: 0,
            iindex_bytes: iindex.map_or(0, IndexWidth::bytes),
            scalar_bytes: scalar.bytes(),
        }
    }

    pub fn from_bytes(oindex_bytes: u64, iindex_bytes: u64, scalar_bytes: u64) -> Result<Self> {
        let ok = |b: u64, zero_ok: bool| matches!(b, 1 | 2 | 4 | 8) || (zero_ok && b == 0);
        if !ok(oindex_bytes, true) || !ok(iindex_bytes, true) || !ok(scalar_bytes, false) {
            return Err(Error::Config(format!(
                "widths must be 1, 2, 4 or 8 bytes (0 allowed for indices): {oindex_bytes}/{iindex_bytes}/{scalar_bytes}"
            )));
        }
        Ok(StorageWidths {
            oindex_bytes,
            iindex_bytes,
            scalar_bytes,
        })
    }
}

impl fmt::Display for StorageWidths {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "i{}/i{}/f{}",
            self.oindex_bytes * 8,
            self.iindex_bytes * 8,
            self.scalar_bytes * 8
        )
    }
}

/// Byte breakdown of one matrix (and optionally the SpMV vectors).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrafficReport {
    pub nnz: u64,
    pub rowptr_bytes: u64,
    pub colids_bytes: u64,
    pub values_bytes: u64,
    pub vector_bytes: u64,
    pub total_bytes: u64,
}

impl TrafficReport {
    /// Row pointers plus column indices.
    pub fn bookkeeping_bytes(&self) -> u64 {
        self.rowptr_bytes + self.colids_bytes
    }

    /// Bookkeeping bytes per pattern entry; 0 for an empty pattern.
    pub fn bytes_per_nnz(&self) -> f64 {
        if self.nnz == 0 {
            0.0
        } else {
            self.bookkeeping_bytes() as f64 / self.nnz as f64
        }
    }
}

pub fn mib(bytes: u64) -> f64 {
    bytes as f64 / MIB
}

pub fn matrix_traffic(nrows: u64, nnz: u64, w: &StorageWidths) -> TrafficReport {
    let rowptr_bytes = (nrows + 1) * w.oindex_bytes;
    let colids_bytes = nnz * w.iindex_bytes;
    let values_bytes = nnz * w.scalar_bytes;
    TrafficReport {
        nnz,
        rowptr_bytes,
        colids_bytes,
        values_bytes,
        vector_bytes: 0,
        total_bytes: rowptr_bytes + colids_bytes + values_bytes,
    }
}

/// Matrix traffic plus `x` (ncols) and `y` (nrows).
pub fn spmv_traffic(nrows: u64, ncols: u64, nnz: u64, w: &StorageWidths) -> TrafficReport {
    let mut t = matrix_traffic(nrows, nnz, w);
    t.vector_bytes = (ncols + nrows) * w.scalar_bytes;
    t.total_bytes += t.vector_bytes;
    t
}

/// What traffic a speedup prediction compares.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrafficBasis {
    /// `iindex + scalar` bytes per nonzero; row pointers and vectors ignored.
    PerNonzero,
    /// Full matrix traffic for the given shape.
    Matrix { nrows: u64, nnz: u64 },
    /// Matrix plus vector traffic for the given shape.
    Spmv { nrows: u64, ncols: u64, nnz: u64 },
}

impl TrafficBasis {
    pub fn traffic(&self, w: &StorageWidths) -> u64 {
        match *self {
            TrafficBasis::PerNonzero => w.iindex_bytes + w.scalar_bytes,
            TrafficBasis::Matrix { nrows, nnz } => matrix_traffic(nrows, nnz, w).total_bytes,
            TrafficBasis::Spmv { nrows, ncols, nnz } => {
                spmv_traffic(nrows, ncols, nnz, w).total_bytes
            }
        }
    }
}

/// Predicted memory-bound speedup of `to` over `from`:
/// `traffic(from) / traffic(to)`.
pub fn predicted_speedup(
    from: &StorageWidths,
    to: &StorageWidths,
    basis: TrafficBasis,
) -> Result<Rational> {
    let (num, den) = (basis.traffic(from), basis.traffic(to));
    if num == 0 || den == 0 {
        return Err(Error::NonPositiveInput {
            what: "traffic",
            value: if num == 0 { num as f64 } else { den as f64 },
        });
    }
    Ok(Rational::new(u128::from(num), u128::from(den)))
}

/// Traffic reduction factor `traffic(to) / traffic(from)`, the reciprocal of
/// [`predicted_speedup`].
pub fn traffic_ratio(
    from: &StorageWidths,
    to: &StorageWidths,
    basis: TrafficBasis,
) -> Result<Rational> {
    predicted_speedup(from, to, basis).map(|r| r.recip())
}

pub fn ratio_to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// `"6/5 = 1.2"`.
pub fn format_ratio(r: &Rational) -> String {
    format!("{}/{} = {}", r.numer(), r.denom(), ratio_to_f64(r))
}

/// Relative performance of a candidate at equal work: `t_base / t_cand`.
pub fn relative_performance(t_base: f64, t_cand: f64) -> Result<f64> {
    for t in [t_base, t_cand] {
        if t.is_nan() || t <= 0.0 {
            return Err(Error::NonPositiveTime(t));
        }
    }
    Ok(t_base / t_cand)
}

/// Relative throughput: `(traffic_cand / traffic_base) * (t_base / t_cand)`.
pub fn relative_throughput(
    traffic_base: f64,
    traffic_cand: f64,
    t_base: f64,
    t_cand: f64,
) -> Result<f64> {
    for (what, value) in [
        ("baseline traffic", traffic_base),
        ("candidate traffic", traffic_cand),
        ("baseline time", t_base),
        ("candidate time", t_cand),
    ] {
        if value.is_nan() || value <= 0.0 {
            return Err(Error::NonPositiveInput { what, value });
        }
    }
    Ok((traffic_cand / traffic_base) * (t_base / t_cand))
}

#[cfg(test)]
mod tests {
    use super::*;

    const I32: IndexWidth = IndexWidth::W32;
    const I16: IndexWidth = IndexWidth::W16;

    #[test]
    fn example_one_traffic() {
        let w = StorageWidths::new(I32, I32, ScalarWidth::F64);
        let t = spmv_traffic(4, 4, 5, &w);
        assert_eq!(
            (
                t.rowptr_bytes,
                t.colids_bytes,
                t.values_bytes,
                t.vector_bytes
            ),
            (20, 20, 40, 64)
        );
        assert_eq!(t.total_bytes, 144);
        let w = StorageWidths::new(I32, I16, ScalarWidth::F64);
        assert_eq!(spmv_traffic(4, 4, 5, &w).total_bytes, 134);
    }

    #[test]
    fn empty_matrix_is_one_sentinel() {
        let w = StorageWidths::new(I32, I16, ScalarWidth::F64);
        let t = matrix_traffic(0, 0, &w);
        assert_eq!(t.total_bytes, 4);
        assert_eq!(t.bytes_per_nnz(), 0.0);
    }

    #[test]
    fn traffic_is_linear() {
        let w = StorageWidths::new(IndexWidth::W64, I16, ScalarWidth::F32);
        let base = matrix_traffic(10, 100, &w).total_bytes;
        assert_eq!(matrix_traffic(10, 200, &w).total_bytes - base, 100 * 6);
        assert_eq!(matrix_traffic(20, 100, &w).total_bytes - base, 10 * 8);
    }

    #[test]
    fn speedup_examples() {
        let f64_i32 = StorageWidths::per_nonzero(Some(I32), ScalarWidth::F64);
        let f64_i16 = StorageWidths::per_nonzero(Some(I16), ScalarWidth::F64);
        let f32_i16 = StorageWidths::per_nonzero(Some(I16), ScalarWidth::F32);
        let s = predicted_speedup(&f64_i32, &f64_i16, TrafficBasis::PerNonzero).unwrap();
        assert_eq!(s, Rational::new(6, 5));
        assert_eq!(format_ratio(&s), "6/5 = 1.2");
        assert_eq!(
            predicted_speedup(&f64_i32, &f64_i32, TrafficBasis::PerNonzero).unwrap(),
            Rational::from_integer(1)
        );
        assert_eq!(
            predicted_speedup(&f64_i32, &f32_i16, TrafficBasis::PerNonzero).unwrap(),
            Rational::from_integer(2)
        );
    }

    #[test]
    fn per_nonzero_ignores_rowptr() {
        let full = StorageWidths::new(I32, I32, ScalarWidth::F64);
        let approx = StorageWidths::per_nonzero(Some(I16), ScalarWidth::F64);
        assert_eq!(
            predicted_speedup(&full, &approx, TrafficBasis::PerNonzero).unwrap(),
            Rational::new(6, 5)
        );
        // with the shape, row pointers pull the ratio below 6/5
        let shaped = predicted_speedup(
            &full,
            &StorageWidths::new(I32, I16, ScalarWidth::F64),
            TrafficBasis::Matrix {
                nrows: 100,
                nnz: 1000,
            },
        )
        .unwrap();
        assert!(shaped < Rational::new(6, 5) && shaped > Rational::from_integer(1));
    }

    #[test]
    fn relative_measures() {
        assert_eq!(relative_performance(2.0, 1.0).unwrap(), 2.0);
        assert_eq!(relative_performance(1.5, 1.5).unwrap(), 1.0);
        assert_eq!(relative_performance(1.175, 1.0).unwrap(), 1.175);
        assert!(matches!(
            relative_performance(0.0, 1.0),
            Err(Error::NonPositiveTime(_))
        ));
        assert!(relative_performance(1.0, -1.0).is_err());
        assert!(relative_performance(f64::NAN, 1.0).is_err());

        assert_eq!(relative_throughput(7.0, 7.0, 3.0, 3.0).unwrap(), 1.0);
        let perfect = relative_throughput(6.0, 5.0, 1.2, 1.0).unwrap();
        assert!((perfect - 1.0).abs() < 1e-15);
        let observed = relative_throughput(6.0, 5.0, 1.175, 1.0).unwrap();
        assert!((observed - 0.979).abs() < 5e-4);
        assert!(relative_throughput(0.0, 5.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn width_validation() {
        assert!(StorageWidths::from_bytes(4, 2, 8).is_ok());
        assert!(StorageWidths::from_bytes(0, 0, 1).is_ok());
        assert!(StorageWidths::from_bytes(4, 3, 8).is_err());
        assert!(StorageWidths::from_bytes(4, 4, 0).is_err());
    }
}
