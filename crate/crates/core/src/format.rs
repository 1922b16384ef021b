//! Storage formats chosen at run time.
//!
//! The matrix types are generic over their index and scalar types; this
//! module maps a [`FormatSpec`] parsed from the command line or a config
//! onto the matching monomorphization.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::csr::CsrMatrix;
use crate::error::{Error, Result};
use crate::model::StorageWidths;
use crate::spmv::SparseMatVec;
use crate::width::{IndexWidth, Scalar, ScalarWidth};

/// Canonical in-memory form every loaded matrix is kept in before conversion.
pub type WideCsr = CsrMatrix<i64, i64, f64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StorageKind {
    Csr,
    Dacsr,
}

impl fmt::Display for StorageKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StorageKind::Csr => "csr",
            StorageKind::Dacsr => "dacsr",
        })
    }
}

impl FromStr for StorageKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csr" => Ok(StorageKind::Csr),
            "dacsr" | "da-csr" => Ok(StorageKind::Dacsr),
            other => Err(Error::Config(format!("unknown storage format `{other}`"))),
        }
    }
}

/// A storage format with all three widths.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FormatSpec {
    pub kind: StorageKind,
    pub oindex: IndexWidth,
    pub iindex: IndexWidth,
    pub scalar: ScalarWidth,
}

impl FormatSpec {
    pub fn new(
        kind: StorageKind,
        oindex: IndexWidth,
        iindex: IndexWidth,
        scalar: ScalarWidth,
    ) -> Self {
        FormatSpec {
            kind,
            oindex,
            iindex,
            scalar,
        }
    }

    pub fn widths(&self) -> StorageWidths {
        StorageWidths::new(self.oindex, self.iindex, self.scalar)
    }
}

impl fmt::Display for FormatSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}:{}:{}",
            self.kind, self.oindex, self.iindex, self.scalar
        )
    }
}

impl FromStr for FormatSpec {
    type Err = Error;

    /// `kind:iindex:scalar` (32-bit row pointers) or
    /// `kind:oindex:iindex:scalar`, e.g. `dacsr:i16:f64`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let (kind, o, i, sc) = match parts.as_slice() {
            [k, i, sc] => (k, "i32", i, sc),
            [k, o, i, sc] => (k, *o, i, sc),
            _ => {
                return Err(Error::Config(format!(
                    "format `{s}` should look like dacsr:i16:f64 or csr:i32:i32:f64"
                )))
            }
        };
        Ok(FormatSpec {
            kind: kind.parse()?,
            oindex: o.parse().map_err(Error::Config)?,
            iindex: i.parse().map_err(Error::Config)?,
            scalar: sc.parse().map_err(Error::Config)?,
        })
    }
}

/// Expands `$body` once per (row pointer, column index) type pair, with the
/// concrete types bound to `$O` and `$I`.
macro_rules! with_index_types {
    ($o:expr, $i:expr, |$O:ident, $I:ident| $body:expr) => {
        match $o {
            IndexWidth::W8 => {
                type $O = i8;
                with_index_types!(@inner $i, $I, $body)
            }
            IndexWidth::W16 => {
                type $O = i16;
                with_index_types!(@inner $i, $I, $body)
            }
            IndexWidth::W32 => {
                type $O = i32;
                with_index_types!(@inner $i, $I, $body)
            }
            IndexWidth::W64 => {
                type $O = i64;
                with_index_types!(@inner $i, $I, $body)
            }
        }
    };
    (@inner $i:expr, $I:ident, $body:expr) => {
        match $i {
            IndexWidth::W8 => {
                type $I = i8;
                $body
            }
            IndexWidth::W16 => {
                type $I = i16;
                $body
            }
            IndexWidth::W32 => {
                type $I = i32;
                $body
            }
            IndexWidth::W64 => {
                type $I = i64;
                $body
            }
        }
    };
}

fn check_scalar<S: Scalar>(spec: &FormatSpec) -> Result<()> {
    if !spec.scalar.is_executable() {
        return Err(Error::UnsupportedScalarWidth(spec.scalar));
    }
    if spec.scalar != S::WIDTH {
        return Err(Error::Config(format!(
            "format {spec} requested with {} vectors",
            S::WIDTH
        )));
    }
    Ok(())
}

/// Converts `base` into the requested storage, ready for SpMV with `S`
/// vectors. `S` must match `spec.scalar`.
pub fn build_operator<S: Scalar>(
    base: &WideCsr,
    spec: &FormatSpec,
) -> Result<Box<dyn SparseMatVec<S>>> {
    check_scalar::<S>(spec)?;
    with_index_types!(spec.oindex, spec.iindex, |O, I| {
        Ok(match spec.kind {
            StorageKind::Csr => Box::new(base.convert::<O, I, S>()?) as Box<dyn SparseMatVec<S>>,
            StorageKind::Dacsr => Box::new(base.convert::<O, i64, S>()?.to_dacsr::<I>()?),
        })
    })
}

/// Converts `base` and writes it in the text storage format.
pub fn write_converted(base: &WideCsr, spec: &FormatSpec, sink: impl Write) -> Result<()> {
    if !spec.scalar.is_executable() {
        return Err(Error::UnsupportedScalarWidth(spec.scalar));
    }
    macro_rules! emit {
        ($S:ty) => {
            with_index_types!(spec.oindex, spec.iindex, |O, I| match spec.kind {
                StorageKind::Csr =>
                    crate::io::storage::write_csr(&base.convert::<O, I, $S>()?, sink),
                StorageKind::Dacsr => {
                    crate::io::storage::write_dacsr(
                        &base.convert::<O, i64, $S>()?.to_dacsr::<I>()?,
                        sink,
                    )
                }
            })
        };
    }
    match spec.scalar {
        ScalarWidth::F64 => emit!(f64),
        _ => emit!(f32),
    }
}
