use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Sub};

use serde::{Serialize, Serializer};

/// Polynomial degree with an explicit `-inf` for the zero polynomial.
///
/// `NegInf` orders strictly below every finite degree and absorbs
/// integer offsets, so `NegInf + n == NegInf` for every `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    NegInf,
    Finite(i64),
}

impl Degree {
    pub fn finite(self) -> Option<i64> {
        match self {
            Degree::NegInf => None,
            Degree::Finite(d) => Some(d),
        }
    }

    pub fn is_neg_inf(self) -> bool {
        matches!(self, Degree::NegInf)
    }

    /// Finite degree, with the zero polynomial mapped to `zero_as`.
    pub fn unwrap_or(self, zero_as: i64) -> i64 {
        self.finite().unwrap_or(zero_as)
    }
}

impl Add for Degree {
    type Output = Degree;

    fn add(self, rhs: Degree) -> Degree {
        match (self, rhs) {
            (Degree::Finite(a), Degree::Finite(b)) => Degree::Finite(a + b),
            _ => Degree::NegInf,
        }
    }
}

impl Add<i64> for Degree {
    type Output = Degree;

    fn add(self, rhs: i64) -> Degree {
        match self {
            Degree::Finite(a) => Degree::Finite(a + rhs),
            Degree::NegInf => Degree::NegInf,
        }
    }
}

impl Sub<i64> for Degree {
    type Output = Degree;

    fn sub(self, rhs: i64) -> Degree {
        self + (-rhs)
    }
}

impl PartialEq<i64> for Degree {
    fn eq(&self, other: &i64) -> bool {
        *self == Degree::Finite(*other)
    }
}

impl PartialOrd<i64> for Degree {
    fn partial_cmp(&self, other: &i64) -> Option<Ordering> {
        Some(self.cmp(&Degree::Finite(*other)))
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::NegInf => f.write_str("-inf"),
            Degree::Finite(d) => write!(f, "{d}"),
        }
    }
}

impl Serialize for Degree {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Degree::NegInf => serializer.serialize_str("-inf"),
            Degree::Finite(d) => serializer.serialize_i64(*d),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neg_inf_is_below_everything() {
        assert!(Degree::NegInf < Degree::Finite(i64::MIN));
        assert!(Degree::NegInf < 0);
        assert!(Degree::Finite(2) < 3);
        assert!(!(Degree::Finite(3) < 3));
    }

    #[test]
    fn neg_inf_absorbs() {
        assert_eq!(Degree::NegInf + 7, Degree::NegInf);
        assert_eq!(Degree::NegInf - 7, Degree::NegInf);
        assert_eq!(Degree::Finite(2) + Degree::NegInf, Degree::NegInf);
        assert_eq!(Degree::Finite(2) + Degree::Finite(5), Degree::Finite(7));
    }
}
