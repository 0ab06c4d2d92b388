use std::cmp::Ordering;
use std::fmt::{Debug, Display};

use num_traits::{FromPrimitive, Num, Signed};

/// Ordered field used for matching values, preferences, votes and duals.
///
/// Every algorithm in this crate only needs field operations and a total
/// order on the values it actually meets. Exactness is a property of the
/// chosen type: [`crate::Rational`] and [`crate::Rational64`] are exact,
/// `f64` works but comparisons at thresholds are then approximate.
pub trait Scalar:
    Clone + PartialOrd + Num + Signed + FromPrimitive + Debug + Display + Send + Sync + 'static
{
    fn half() -> Self {
        Self::one() / (Self::one() + Self::one())
    }

    fn from_int(v: i64) -> Self {
        Self::from_i64(v).expect("integer fits scalar")
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_int(num) / Self::from_int(den)
    }

    fn total_cmp(&self, other: &Self) -> Ordering {
        self.partial_cmp(other).unwrap_or(Ordering::Equal)
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    /// `max(self, 0)`.
    fn positive_part(&self) -> Self {
        if self.is_positive() {
            self.clone()
        } else {
            Self::zero()
        }
    }
}

impl<T> Scalar for T where
    T: Clone
        + PartialOrd
        + Num
        + Signed
        + FromPrimitive
        + Debug
        + Display
        + Send
        + Sync
        + 'static
{
}

/// Sum of an iterator of scalars.
pub fn sum<'a, S: Scalar, I: IntoIterator<Item = &'a S>>(items: I) -> S {
    items.into_iter().fold(S::zero(), |acc, x| acc + x.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Rational, Rational64};

    #[test]
    fn half_is_exact_for_rationals() {
        let h = Rational::half();
        assert_eq!(h.clone() + h, Rational::from_int(1));
        assert_eq!(Rational64::half(), Rational64::new(1, 2));
    }

    #[test]
    fn positive_part() {
        assert_eq!(Rational64::from_ratio(-3, 2).positive_part(), Rational64::from_int(0));
        assert_eq!(Rational64::from_ratio(3, 2).positive_part(), Rational64::new(3, 2));
        assert_eq!((-1.5f64).positive_part(), 0.0);
    }
}
