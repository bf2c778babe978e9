use std::cmp::Ordering;
use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// Extended real number: a finite `f64`, `+∞` or `-∞`. Never NaN.
///
/// Variant order gives the natural total order `-∞ < finite < +∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    NegInf,
    Finite(f64),
    PosInf,
}

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal::Finite(0.0);

    /// Classify an `f64`; infinities map to the infinite variants. NaN is rejected.
    pub fn new(x: f64) -> Result<Self> {
        if x.is_nan() {
            Err(Error::Invalid("NaN is not an extended real".into()))
        } else if x == f64::INFINITY {
            Ok(ExtReal::PosInf)
        } else if x == f64::NEG_INFINITY {
            Ok(ExtReal::NegInf)
        } else {
            Ok(ExtReal::Finite(x))
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn is_pos_inf(self) -> bool {
        self == ExtReal::PosInf
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(x) => Some(x),
            _ => None,
        }
    }

    /// IEEE view of the value (infinite variants map to `±inf`).
    pub fn to_f64(self) -> f64 {
        match self {
            ExtReal::NegInf => f64::NEG_INFINITY,
            ExtReal::Finite(x) => x,
            ExtReal::PosInf => f64::INFINITY,
        }
    }

    pub fn checked_add(self, rhs: ExtReal) -> Result<ExtReal> {
        use ExtReal::*;
        match (self, rhs) {
            (PosInf, NegInf) | (NegInf, PosInf) => Err(Error::Indeterminate),
            (PosInf, _) | (_, PosInf) => Ok(PosInf),
            (NegInf, _) | (_, NegInf) => Ok(NegInf),
            (Finite(a), Finite(b)) => ExtReal::new(a + b),
        }
    }

    pub fn checked_sub(self, rhs: ExtReal) -> Result<ExtReal> {
        self.checked_add(-rhs)
    }

    /// Multiply by a finite nonzero scalar.
    pub fn scale(self, c: f64) -> ExtReal {
        debug_assert!(c.is_finite() && c != 0.0);
        match self {
            ExtReal::Finite(x) => ExtReal::Finite(x * c),
            inf if c > 0.0 => inf,
            inf => -inf,
        }
    }

    /// `self - rhs`, with equal infinities treated as a tie (zero gap).
    ///
    /// Used for certification slacks, where an attained infinite extremum
    /// compared against an infinite objective is an exact match.
    pub fn gap(self, rhs: ExtReal) -> ExtReal {
        use ExtReal::*;
        match (self, rhs) {
            (PosInf, PosInf) | (NegInf, NegInf) => ExtReal::ZERO,
            (PosInf, _) | (_, NegInf) => PosInf,
            (NegInf, _) | (_, PosInf) => NegInf,
            (Finite(a), Finite(b)) => Finite(a - b),
        }
    }

    /// `|self - rhs|` with equal infinities at distance 0 and mismatches at `+inf`.
    pub fn distance(self, rhs: ExtReal) -> f64 {
        self.gap(rhs).to_f64().abs()
    }
}

impl std::ops::Neg for ExtReal {
    type Output = ExtReal;
    fn neg(self) -> ExtReal {
        match self {
            ExtReal::NegInf => ExtReal::PosInf,
            ExtReal::Finite(x) => ExtReal::Finite(-x),
            ExtReal::PosInf => ExtReal::NegInf,
        }
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.to_f64().partial_cmp(&other.to_f64())
    }
}

impl From<ExtReal> for f64 {
    fn from(x: ExtReal) -> f64 {
        x.to_f64()
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::NegInf => f.write_str("-inf"),
            ExtReal::PosInf => f.write_str("inf"),
            ExtReal::Finite(x) => write!(f, "{x}"),
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtReal::NegInf => s.serialize_str("-inf"),
            ExtReal::PosInf => s.serialize_str("inf"),
            ExtReal::Finite(x) => s.serialize_f64(*x),
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = ExtReal;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a finite number or one of \"inf\", \"-inf\"")
            }
            fn visit_f64<E: de::Error>(self, x: f64) -> std::result::Result<ExtReal, E> {
                if x.is_finite() {
                    Ok(ExtReal::Finite(x))
                } else {
                    Err(E::custom("non-finite number; use \"inf\" or \"-inf\""))
                }
            }
            fn visit_i64<E: de::Error>(self, x: i64) -> std::result::Result<ExtReal, E> {
                Ok(ExtReal::Finite(x as f64))
            }
            fn visit_u64<E: de::Error>(self, x: u64) -> std::result::Result<ExtReal, E> {
                Ok(ExtReal::Finite(x as f64))
            }
            fn visit_str<E: de::Error>(self, s: &str) -> std::result::Result<ExtReal, E> {
                match s {
                    "inf" | "+inf" => Ok(ExtReal::PosInf),
                    "-inf" => Ok(ExtReal::NegInf),
                    other => Err(E::custom(format!("unknown extended real {other:?}"))),
                }
            }
        }
        d.deserialize_any(V)
    }
}
