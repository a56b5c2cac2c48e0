//! Nonnegative extended reals `[0, ∞]`, the codomain of time separations.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::Add;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A value in `[0, ∞]` with `+∞` carried as its own variant.
///
/// Serialized as a JSON number, or as the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    Infinite,
}

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal::Finite(0.0);

    /// Converts from `f64`, mapping IEEE `+inf` to [`ExtReal::Infinite`].
    ///
    /// Returns `None` for negative or NaN input.
    pub fn from_f64(v: f64) -> Option<Self> {
        if v.is_nan() || v < 0.0 {
            None
        } else if v == f64::INFINITY {
            Some(ExtReal::Infinite)
        } else {
            Some(ExtReal::Finite(v))
        }
    }

    /// Lossless conversion to `f64` (`Infinite` becomes IEEE `+inf`).
    pub fn to_f64(self) -> f64 {
        match self {
            ExtReal::Finite(v) => v,
            ExtReal::Infinite => f64::INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn is_zero(self) -> bool {
        self == ExtReal::ZERO
    }

    pub fn is_positive(self) -> bool {
        match self {
            ExtReal::Finite(v) => v > 0.0,
            ExtReal::Infinite => true,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            ExtReal::Infinite => None,
        }
    }

    /// Tolerant equality; two infinities are equal.
    pub fn approx_eq(self, other: ExtReal) -> bool {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => crate::tolerance::approx_eq(a, b),
            (ExtReal::Infinite, ExtReal::Infinite) => true,
            _ => false,
        }
    }

    /// Tolerant `self ≤ other`.
    pub fn approx_le(self, other: ExtReal) -> bool {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => crate::tolerance::approx_le(a, b),
            (_, ExtReal::Infinite) => true,
            (ExtReal::Infinite, ExtReal::Finite(_)) => false,
        }
    }

    pub fn max(self, other: ExtReal) -> ExtReal {
        if self >= other {
            self
        } else {
            other
        }
    }
}

impl Default for ExtReal {
    fn default() -> Self {
        ExtReal::ZERO
    }
}

impl From<f64> for ExtReal {
    /// Panics on negative or NaN input; use [`ExtReal::from_f64`] for
    /// untrusted values.
    fn from(v: f64) -> Self {
        ExtReal::from_f64(v).expect("extended real must be nonnegative")
    }
}

impl Add for ExtReal {
    type Output = ExtReal;

    fn add(self, rhs: ExtReal) -> ExtReal {
        match (self, rhs) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(a + b),
            _ => ExtReal::Infinite,
        }
    }
}

impl Sum for ExtReal {
    fn sum<I: Iterator<Item = ExtReal>>(iter: I) -> Self {
        iter.fold(ExtReal::ZERO, |acc, x| acc + x)
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a.total_cmp(b),
            (ExtReal::Finite(_), ExtReal::Infinite) => Ordering::Less,
            (ExtReal::Infinite, ExtReal::Finite(_)) => Ordering::Greater,
            (ExtReal::Infinite, ExtReal::Infinite) => Ordering::Equal,
        })
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ExtReal::Finite(v) => s.serialize_f64(*v),
            ExtReal::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct ExtVisitor;

        impl Visitor<'_> for ExtVisitor {
            type Value = ExtReal;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a nonnegative number or \"inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<ExtReal, E> {
                ExtReal::from_f64(v).ok_or_else(|| E::custom(format!("negative value {v}")))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<ExtReal, E> {
                self.visit_f64(v as f64)
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<ExtReal, E> {
                self.visit_f64(v as f64)
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<ExtReal, E> {
                if v == "inf" {
                    Ok(ExtReal::Infinite)
                } else {
                    Err(E::custom(format!("unexpected string {v:?}")))
                }
            }
        }

        d.deserialize_any(ExtVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn infinity_absorbs_addition() {
        assert_eq!(ExtReal::Finite(3.0) + ExtReal::Infinite, ExtReal::Infinite);
        assert_eq!(ExtReal::Infinite + ExtReal::ZERO, ExtReal::Infinite);
        assert_eq!(ExtReal::Finite(1.5) + ExtReal::Finite(2.0), ExtReal::Finite(3.5));
    }

    #[test]
    fn serde_uses_inf_string() {
        let v = vec![ExtReal::Finite(2.0), ExtReal::Infinite];
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, "[2.0,\"inf\"]");
        let back: Vec<ExtReal> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
        assert!(serde_json::from_str::<ExtReal>("-1.0").is_err());
    }

    fn ext() -> impl Strategy<Value = ExtReal> {
        prop_oneof![
            (0.0f64..1e6).prop_map(ExtReal::Finite),
            Just(ExtReal::Infinite),
        ]
    }

    proptest! {
        #[test]
        fn addition_is_monotone(a in ext(), b in ext(), c in ext()) {
            if a <= b {
                prop_assert!(a + c <= b + c);
            }
        }

        #[test]
        fn comparison_is_total(a in ext(), b in ext()) {
            prop_assert!(a <= b || b <= a);
        }
    }
}
