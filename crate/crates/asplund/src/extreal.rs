//! Extended reals `(-∞, ∞]` — the codomain of proper convex functions.
//!
//! `+∞` is a dedicated variant rather than a large float so that the
//! arithmetic (`finite + finite = finite`, `x + ∞ = ∞`, `λ·∞ = ∞` for
//! `λ > 0`) stays exact. `−∞` is unrepresentable by construction.

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

/// A value in `(-∞, ∞]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    Infinity,
}

pub use ExtReal::{Finite, Infinity};

impl ExtReal {
    pub fn is_finite(self) -> bool {
        matches!(self, Finite(_))
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Infinity)
    }

    /// The finite value, if any.
    pub fn finite(self) -> Option<f64> {
        match self {
            Finite(v) => Some(v),
            Infinity => None,
        }
    }

    /// Finite value or panic; for contexts where finiteness was already checked.
    pub fn unwrap_finite(self) -> f64 {
        self.finite().expect("expected a finite extended real")
    }

    /// Scale by `λ > 0` (the cone action; `λ·∞ = ∞`).
    pub fn scale(self, lambda: f64) -> ExtReal {
        debug_assert!(lambda > 0.0);
        match self {
            Finite(v) => Finite(lambda * v),
            Infinity => Infinity,
        }
    }

    /// Apply `f` to the finite part, keep `∞` as is.
    pub fn map<F: FnOnce(f64) -> f64>(self, f: F) -> ExtReal {
        match self {
            Finite(v) => Finite(f(v)),
            Infinity => Infinity,
        }
    }

    pub fn min(self, other: ExtReal) -> ExtReal {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: ExtReal) -> ExtReal {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// `|a − b|` with the convention that two infinities agree (distance 0)
    /// and a finite/infinite pair is infinitely far apart.
    pub fn abs_diff(self, other: ExtReal) -> ExtReal {
        match (self, other) {
            (Finite(a), Finite(b)) => Finite((a - b).abs()),
            (Infinity, Infinity) => Finite(0.0),
            _ => Infinity,
        }
    }
}

impl Add for ExtReal {
    type Output = ExtReal;
    fn add(self, rhs: ExtReal) -> ExtReal {
        match (self, rhs) {
            (Finite(a), Finite(b)) => Finite(a + b),
            _ => Infinity,
        }
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &ExtReal) -> Option<Ordering> {
        match (self, other) {
            (Finite(a), Finite(b)) => a.partial_cmp(b),
            (Finite(_), Infinity) => Some(Ordering::Less),
            (Infinity, Finite(_)) => Some(Ordering::Greater),
            (Infinity, Infinity) => Some(Ordering::Equal),
        }
    }
}

impl From<f64> for ExtReal {
    fn from(v: f64) -> Self {
        Finite(v)
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Finite(v) => write!(f, "{v}"),
            Infinity => write!(f, "inf"),
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Finite(v) => serializer.serialize_f64(*v),
            Infinity => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct V;
        impl de::Visitor<'_> for V {
            type Value = ExtReal;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "a finite number or the string \"inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<ExtReal, E> {
                if v.is_finite() {
                    Ok(Finite(v))
                } else if v == f64::INFINITY {
                    Ok(Infinity)
                } else {
                    Err(E::custom("−∞ and NaN are not extended reals"))
                }
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<ExtReal, E> {
                Ok(Finite(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<ExtReal, E> {
                Ok(Finite(v as f64))
            }
            fn visit_str<E: de::Error>(self, s: &str) -> Result<ExtReal, E> {
                match s {
                    "inf" | "+inf" | "Infinity" => Ok(Infinity),
                    _ => s
                        .parse::<f64>()
                        .map(Finite)
                        .map_err(|_| E::custom("unparsable extended real")),
                }
            }
        }
        deserializer.deserialize_any(V)
    }
}
