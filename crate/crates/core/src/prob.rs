use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Mul};

use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// An exact probability in `[0, 1]`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Prob(Ratio<u64>);

impl Prob {
    pub fn zero() -> Self {
        Prob(Ratio::zero())
    }

    pub fn one() -> Self {
        Prob(Ratio::one())
    }

    pub fn new(numer: u64, denom: u64) -> Result<Self> {
        if denom == 0 || numer > denom {
            return Err(Error::ProbOutOfRange(format!("{numer}/{denom}")));
        }
        Ok(Prob(Ratio::new(numer, denom)))
    }

    pub fn from_ratio(r: Ratio<u64>) -> Result<Self> {
        if r > Ratio::one() {
            return Err(Error::ProbOutOfRange(r.to_string()));
        }
        Ok(Prob(r))
    }

    /// `2^-k`.
    pub fn dyadic(k: u32) -> Self {
        Prob(Ratio::new(1, 1u64 << k))
    }

    pub fn ratio(self) -> Ratio<u64> {
        self.0
    }

    pub fn numer(self) -> u64 {
        *self.0.numer()
    }

    pub fn denom(self) -> u64 {
        *self.0.denom()
    }

    pub fn is_zero(self) -> bool {
        self.0.is_zero()
    }

    pub fn to_f64(self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }

    /// Sum that stays a probability, or `None` if it would exceed 1.
    pub fn checked_add(self, rhs: Prob) -> Option<Prob> {
        let s = self.0 + rhs.0;
        (s <= Ratio::one()).then_some(Prob(s))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn div(self, rhs: Prob) -> Result<Prob> {
        if rhs.is_zero() {
            return Err(Error::UndefinedConditional);
        }
        Prob::from_ratio(self.0 / rhs.0)
    }
}

/// Addition of masses known to be disjoint events. Panics if the total
/// exceeds one, which would mean an upstream aggregation bug.
impl Add for Prob {
    type Output = Prob;
    fn add(self, rhs: Prob) -> Prob {
        self.checked_add(rhs).expect("probability sum exceeds 1")
    }
}

impl Mul for Prob {
    type Output = Prob;
    fn mul(self, rhs: Prob) -> Prob {
        Prob(self.0 * rhs.0)
    }
}

impl Sum for Prob {
    fn sum<I: Iterator<Item = Prob>>(iter: I) -> Prob {
        iter.fold(Prob::zero(), |a, b| a + b)
    }
}

impl fmt::Display for Prob {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl fmt::Debug for Prob {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for Prob {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range() {
        assert!(Prob::new(3, 2).is_err());
        assert!(Prob::new(1, 0).is_err());
        assert_eq!(Prob::new(2, 4).unwrap(), Prob::dyadic(1));
    }

    #[test]
    fn formats_reduced() {
        assert_eq!(Prob::new(2, 8).unwrap().to_string(), "1/4");
        assert_eq!(Prob::one().to_string(), "1/1");
        assert_eq!(Prob::zero().to_string(), "0/1");
    }

    #[test]
    fn checked_add_caps_at_one() {
        let h = Prob::dyadic(1);
        assert_eq!(h + h, Prob::one());
        assert!(Prob::one().checked_add(h).is_none());
    }
}
