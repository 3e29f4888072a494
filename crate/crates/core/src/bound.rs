use std::fmt;

use serde::{Serialize, Serializer};

/// A supremum estimate that may be unbounded.
///
/// Unbounded results are never represented as a floating-point infinity in
/// reports; they serialize as the string `"unbounded"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    Finite(f64),
    Unbounded,
}

impl Bound {
    pub(crate) fn from_f64(value: f64) -> Bound {
        if value.is_infinite() {
            Bound::Unbounded
        } else {
            Bound::Finite(value)
        }
    }

    pub fn value(self) -> Option<f64> {
        match self {
            Bound::Finite(v) => Some(v),
            Bound::Unbounded => None,
        }
    }

    pub fn is_unbounded(self) -> bool {
        matches!(self, Bound::Unbounded)
    }

    /// `self <= limit` with the relative slack of [`crate::leq_rel`].
    pub fn at_most(self, limit: f64) -> bool {
        match self {
            Bound::Finite(v) => crate::leq_rel(v, limit),
            Bound::Unbounded => false,
        }
    }

    /// Strict `self < limit`.
    pub fn below(self, limit: f64) -> bool {
        matches!(self, Bound::Finite(v) if v < limit)
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Finite(v) => write!(f, "{v}"),
            Bound::Unbounded => f.write_str("unbounded"),
        }
    }
}

impl Serialize for Bound {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Bound::Finite(v) => serializer.serialize_f64(*v),
            Bound::Unbounded => serializer.serialize_str("unbounded"),
        }
    }
}
