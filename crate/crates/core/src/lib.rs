//! Sparse matrices with diagonal-relative column indices.
//!
//! A DA-CSR matrix stores each column index as its signed distance from the
//! diagonal. After bandwidth reduction ([`reorder::rcm`]) those distances are
//! small, so 16-bit or even 8-bit indices address matrices with millions of
//! columns and the SpMV kernel moves fewer bytes per nonzero.
//!
//! ```
//! use dacsr::{CsrMatrix, SpmvProblem, SpmvVariant, SerialVariant, TripletMatrix};
//!
//! let t = TripletMatrix::from_entries(3, 3, vec![(0, 0, 2.0), (1, 2, 1.0), (2, 1, -1.0)])?;
//! let a = CsrMatrix::<i32, i32, f64>::from_triplets(&t)?;
//! let da = a.to_dacsr::<i8>()?;
//! assert_eq!(da.colids(), &[0, 1, -1]);
//!
//! let x = [1.0, 2.0, 3.0];
//! let mut y = [0.0; 3];
//! dacsr::spmv(&da, SpmvProblem::new(1.0, 0.0, &x, &mut y), SerialVariant::ShiftedBase.into())?;
//! assert_eq!(y, [2.0, 3.0, -2.0]);
//! # Ok::<(), dacsr::Error>(())
//! ```

pub mod analysis;
pub mod bench;
pub mod csr;
pub mod dacsr;
pub mod error;
pub mod format;
pub mod gen;
pub mod io;
pub mod model;
pub mod reorder;
pub mod spmv;
pub mod triplet;
pub mod width;

pub use csr::{Bandwidth, CsrMatrix};
pub use dacsr::DacsrMatrix;
pub use error::{Error, Result};
pub use format::{build_operator, FormatSpec, StorageKind, WideCsr};
pub use model::{predicted_speedup, StorageWidths, TrafficBasis};
pub use reorder::{permute_symmetric, rcm, Permutation};
pub use spmv::{spmv, SerialVariant, SparseMatVec, SpmvProblem, SpmvVariant};
pub use triplet::TripletMatrix;
pub use width::{IndexType, IndexWidth, Scalar, ScalarWidth};
