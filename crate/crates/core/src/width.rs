//! Index and scalar storage types.
//!
//! Every stored integer (row pointers, CSR column indices, DA offsets) uses a
//! signed two's-complement type. CSR column indices and row pointers only ever
//! hold non-negative values, so a width of `k` bits addresses `2^(k-1)` slots.

use std::fmt;
use std::ops::{Add, Mul};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Bit width of an integer index array.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum IndexWidth {
    W8,
    W16,
    W32,
    W64,
}

impl IndexWidth {
    pub const ALL: [IndexWidth; 4] = [
        IndexWidth::W8,
        IndexWidth::W16,
        IndexWidth::W32,
        IndexWidth::W64,
    ];

    pub fn bits(self) -> u32 {
        match self {
            IndexWidth::W8 => 8,
            IndexWidth::W16 => 16,
            IndexWidth::W32 => 32,
            IndexWidth::W64 => 64,
        }
    }

    pub fn bytes(self) -> u64 {
        u64::from(self.bits() / 8)
    }

    /// Largest value representable, `2^(k-1) - 1`.
    pub fn max_value(self) -> u64 {
        (1u64 << (self.bits() - 1)) - 1
    }

    pub fn from_bits(bits: u32) -> Option<Self> {
        match bits {
            8 => Some(IndexWidth::W8),
            16 => Some(IndexWidth::W16),
            32 => Some(IndexWidth::W32),
            64 => Some(IndexWidth::W64),
            _ => None,
        }
    }
}

impl fmt::Display for IndexWidth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "i{}", self.bits())
    }
}

impl FromStr for IndexWidth {
    type Err = String;

    /// Accepts `16`, `i16` or `int16`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let digits = s.trim().trim_start_matches("int").trim_start_matches('i');
        digits
            .parse::<u32>()
            .ok()
            .and_then(IndexWidth::from_bits)
            .ok_or_else(|| format!("unknown index width `{s}` (expected 8, 16, 32 or 64)"))
    }
}

/// Bit width of a binary floating-point scalar.
///
/// Only 64 and 32 bit scalars have kernels; the narrower ones exist for the
/// traffic model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ScalarWidth {
    F64,
    F32,
    F16,
    F8,
}

impl ScalarWidth {
    pub const ALL: [ScalarWidth; 4] = [
        ScalarWidth::F64,
        ScalarWidth::F32,
        ScalarWidth::F16,
        ScalarWidth::F8,
    ];

    pub fn bits(self) -> u32 {
        match self {
            ScalarWidth::F64 => 64,
            ScalarWidth::F32 => 32,
            ScalarWidth::F16 => 16,
            ScalarWidth::F8 => 8,
        }
    }

    pub fn bytes(self) -> u64 {
        u64::from(self.bits() / 8)
    }

    pub fn is_executable(self) -> bool {
        matches!(self, ScalarWidth::F64 | ScalarWidth::F32)
    }

    pub fn from_bits(bits: u32) -> Option<Self> {
        match bits {
            64 => Some(ScalarWidth::F64),
            32 => Some(ScalarWidth::F32),
            16 => Some(ScalarWidth::F16),
            8 => Some(ScalarWidth::F8),
            _ => None,
        }
    }
}

impl fmt::Display for ScalarWidth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "f{}", self.bits())
    }
}

impl FromStr for ScalarWidth {
    type Err = String;

    /// Accepts `64`, `f64` or `float64`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let digits = s.trim().trim_start_matches("float").trim_start_matches('f');
        digits
            .parse::<u32>()
            .ok()
            .and_then(ScalarWidth::from_bits)
            .ok_or_else(|| format!("unknown scalar width `{s}` (expected 64, 32, 16 or 8)"))
    }
}

/// A signed integer type usable for row pointers, column indices and DA offsets.
pub trait IndexType: Copy + Ord + Send + Sync + fmt::Debug + fmt::Display + 'static {
    const WIDTH: IndexWidth;

    /// Checked narrowing from a signed machine integer.
    fn try_from_isize(v: isize) -> Option<Self>;

    fn as_isize(self) -> isize;

    /// Reinterprets a value known to be non-negative as a slot index.
    fn as_usize(self) -> usize;

    fn try_from_usize(v: usize) -> Option<Self> {
        isize::try_from(v).ok().and_then(Self::try_from_isize)
    }
}

macro_rules! impl_index_type {
    ($t:ty, $w:expr) => {
        impl IndexType for $t {
            const WIDTH: IndexWidth = $w;

            #[inline(always)]
            fn try_from_isize(v: isize) -> Option<Self> {
                <$t>::try_from(v).ok()
            }

            #[inline(always)]
            fn as_isize(self) -> isize {
                self as isize
            }

            #[inline(always)]
            fn as_usize(self) -> usize {
                self as usize
            }
        }
    };
}

impl_index_type!(i8, IndexWidth::W8);
impl_index_type!(i16, IndexWidth::W16);
impl_index_type!(i32, IndexWidth::W32);
impl_index_type!(i64, IndexWidth::W64);

/// A floating-point type with SpMV kernels.
pub trait Scalar:
    Copy
    + PartialEq
    + PartialOrd
    + Default
    + Send
    + Sync
    + fmt::Debug
    + fmt::Display
    + fmt::LowerExp
    + Add<Output = Self>
    + Mul<Output = Self>
    + 'static
{
    const WIDTH: ScalarWidth;
    const ZERO: Self;
    const ONE: Self;
    /// Unit roundoff, used to scale comparison tolerances.
    const EPSILON: Self;

    fn from_f64(v: f64) -> Self;
    fn to_f64(self) -> f64;
    fn abs(self) -> Self;
    fn is_nan(self) -> bool;
}

macro_rules! impl_scalar {
    ($t:ty, $w:expr) => {
        impl Scalar for $t {
            const WIDTH: ScalarWidth = $w;
            const ZERO: Self = 0.0;
            const ONE: Self = 1.0;
            const EPSILON: Self = <$t>::EPSILON;

            #[inline(always)]
            fn from_f64(v: f64) -> Self {
                v as $t
            }

            #[inline(always)]
            fn to_f64(self) -> f64 {
                self as f64
            }

            #[inline(always)]
            fn abs(self) -> Self {
                <$t>::abs(self)
            }

            #[inline(always)]
            fn is_nan(self) -> bool {
                <$t>::is_nan(self)
            }
        }
    };
}

impl_scalar!(f64, ScalarWidth::F64);
impl_scalar!(f32, ScalarWidth::F32);
