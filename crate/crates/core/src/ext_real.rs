//! The extended real line `ℝ ∪ {+∞, −∞}`.

use core::cmp::Ordering;
use core::fmt;
use core::ops::{Neg, Sub};

/// A real number or a signed infinity. Never NaN.
///
/// Subtraction follows the slope convention `+∞ − ∞ = 0`: subtracting an
/// infinity from an infinity of the same sign gives zero.
#[derive(Clone, Copy, Debug)]
pub enum ExtReal {
    NegInf,
    Finite(f64),
    PosInf,
}

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal::Finite(0.0);

    /// Maps `±inf` to the matching infinity; `None` for NaN.
    pub fn from_f64(v: f64) -> Option<ExtReal> {
        if v.is_nan() {
            None
        } else if v == f64::INFINITY {
            Some(ExtReal::PosInf)
        } else if v == f64::NEG_INFINITY {
            Some(ExtReal::NegInf)
        } else {
            Some(ExtReal::Finite(v))
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            ExtReal::NegInf => f64::NEG_INFINITY,
            ExtReal::Finite(v) => v,
            ExtReal::PosInf => f64::INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            _ => None,
        }
    }

    /// `s⁺`: zero for `s ≤ 0`, otherwise `s`.
    pub fn positive_part(self) -> ExtReal {
        match self {
            ExtReal::NegInf => ExtReal::ZERO,
            ExtReal::Finite(v) if v <= 0.0 => ExtReal::ZERO,
            other => other,
        }
    }

    pub fn abs(self) -> ExtReal {
        match self {
            ExtReal::NegInf | ExtReal::PosInf => ExtReal::PosInf,
            ExtReal::Finite(v) => ExtReal::Finite(v.abs()),
        }
    }

    /// Division by a positive finite real.
    pub fn div_positive(self, d: f64) -> ExtReal {
        debug_assert!(d > 0.0 && d.is_finite(), "divisor must be positive and finite");
        match self {
            ExtReal::Finite(v) => ExtReal::Finite(v / d),
            inf => inf,
        }
    }

    /// Multiplication by a positive finite real.
    pub fn scale(self, c: f64) -> ExtReal {
        debug_assert!(c > 0.0 && c.is_finite(), "scale must be positive and finite");
        match self {
            ExtReal::Finite(v) => ExtReal::Finite(v * c),
            inf => inf,
        }
    }

    pub fn max(self, other: ExtReal) -> ExtReal {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: ExtReal) -> ExtReal {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl From<f64> for ExtReal {
    fn from(v: f64) -> Self {
        ExtReal::from_f64(v).expect("NaN is not an extended real")
    }
}

impl PartialEq for ExtReal {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for ExtReal {}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtReal {
    fn cmp(&self, other: &Self) -> Ordering {
        use ExtReal::*;
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
            (NegInf, _) | (_, PosInf) => Ordering::Less,
            (_, NegInf) | (PosInf, _) => Ordering::Greater,
            // -0.0 and 0.0 compare equal here, unlike total_cmp.
            (Finite(a), Finite(b)) => a.partial_cmp(b).unwrap_or_else(|| a.total_cmp(b)),
        }
    }
}

impl Neg for ExtReal {
    type Output = ExtReal;

    fn neg(self) -> ExtReal {
        match self {
            ExtReal::NegInf => ExtReal::PosInf,
            ExtReal::Finite(v) => ExtReal::Finite(-v),
            ExtReal::PosInf => ExtReal::NegInf,
        }
    }
}

impl Sub for ExtReal {
    type Output = ExtReal;

    fn sub(self, rhs: ExtReal) -> ExtReal {
        use ExtReal::*;
        match (self, rhs) {
            (PosInf, PosInf) | (NegInf, NegInf) => ExtReal::ZERO,
            (PosInf, _) | (_, NegInf) => PosInf,
            (NegInf, _) | (_, PosInf) => NegInf,
            (Finite(a), Finite(b)) => Finite(a - b),
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::NegInf => f.write_str("-inf"),
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::PosInf => f.write_str("+inf"),
        }
    }
}

#[cfg(feature = "serde")]
mod serde_impl {
    use super::ExtReal;
    use core::fmt;
    use serde::de::{self, Visitor};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    // Infinities are written as the strings "+inf" / "-inf"; JSON has no
    // representation for them as numbers.
    impl Serialize for ExtReal {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            match self {
                ExtReal::Finite(v) => s.serialize_f64(*v),
                ExtReal::PosInf => s.serialize_str("+inf"),
                ExtReal::NegInf => s.serialize_str("-inf"),
            }
        }
    }

    struct ExtRealVisitor;

    impl Visitor<'_> for ExtRealVisitor {
        type Value = ExtReal;

        fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            f.write_str("a number or one of \"+inf\", \"inf\", \"-inf\"")
        }

        fn visit_f64<E: de::Error>(self, v: f64) -> Result<ExtReal, E> {
            ExtReal::from_f64(v).ok_or_else(|| E::custom("NaN is not an extended real"))
        }

        fn visit_i64<E: de::Error>(self, v: i64) -> Result<ExtReal, E> {
            Ok(ExtReal::Finite(v as f64))
        }

        fn visit_u64<E: de::Error>(self, v: u64) -> Result<ExtReal, E> {
            Ok(ExtReal::Finite(v as f64))
        }

        fn visit_str<E: de::Error>(self, v: &str) -> Result<ExtReal, E> {
            match v {
                "+inf" | "inf" | "+infinity" | "infinity" => Ok(ExtReal::PosInf),
                "-inf" | "-infinity" => Ok(ExtReal::NegInf),
                other => Err(E::invalid_value(de::Unexpected::Str(other), &self)),
            }
        }
    }

    impl<'de> Deserialize<'de> for ExtReal {
        fn deserialize<D: Deserializer<'de>>(d: D) -> Result<ExtReal, D::Error> {
            d.deserialize_any(ExtRealVisitor)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::ExtReal::{self, *};

    #[test]
    fn infinity_minus_infinity_is_zero() {
        assert_eq!(PosInf - PosInf, ExtReal::ZERO);
        assert_eq!(NegInf - NegInf, ExtReal::ZERO);
        assert_eq!(PosInf - NegInf, PosInf);
        assert_eq!(Finite(3.0) - PosInf, NegInf);
    }

    #[test]
    fn positive_part() {
        assert_eq!(Finite(-2.0).positive_part(), ExtReal::ZERO);
        assert_eq!(Finite(0.0).positive_part(), ExtReal::ZERO);
        assert_eq!(Finite(1.5).positive_part(), Finite(1.5));
        assert_eq!(NegInf.positive_part(), ExtReal::ZERO);
        assert_eq!(PosInf.positive_part(), PosInf);
    }

    #[test]
    fn ordering_puts_infinities_at_the_ends() {
        let mut v = [Finite(1.0), PosInf, NegInf, Finite(-7.0), Finite(-0.0), Finite(0.0)];
        v.sort();
        assert_eq!(v[0], NegInf);
        assert_eq!(v[5], PosInf);
        assert_eq!(Finite(-0.0), Finite(0.0));
    }

    #[test]
    fn from_f64_maps_infinities() {
        assert_eq!(ExtReal::from(f64::INFINITY), PosInf);
        assert_eq!(ExtReal::from_f64(f64::NAN), None);
        assert_eq!(PosInf.to_f64(), f64::INFINITY);
    }
}
