use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::QError;

/// An exact rational power of q.
///
/// Always reduced with a positive denominator, so the derived ordering and
/// equality agree with the rational ones.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Exponent(Ratio<i64>);

impl Exponent {
    pub const ZERO: Exponent = Exponent(Ratio::new_raw(0, 1));
    pub const ONE: Exponent = Exponent(Ratio::new_raw(1, 1));

    pub fn new(numer: i64, denom: i64) -> Self {
        Exponent(Ratio::new(numer, denom))
    }

    pub fn int(n: i64) -> Self {
        Exponent(Ratio::from_integer(n))
    }

    pub fn numer(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i64 {
        *self.0.denom()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        Exponent(self.0.abs())
    }

    pub fn floor(&self) -> i64 {
        self.0.floor().to_integer()
    }

    pub fn ceil(&self) -> i64 {
        self.0.ceil().to_integer()
    }

    /// Fractional part in `[0, 1)`.
    pub fn fract_part(&self) -> Self {
        *self - Exponent::int(self.floor())
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn as_ratio(&self) -> Ratio<i64> {
        self.0
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    /// `C(self, 2) = self (self - 1) / 2`, defined for rational arguments.
    pub fn binom2(self) -> Self {
        self * (self - Exponent::ONE) / 2
    }
}

/// `C(n, 2)` for an integer `n`, as used throughout the quadratic exponents.
pub fn binom2(n: i64) -> i64 {
    n * (n - 1) / 2
}

/// Least common multiple of the denominators of the given exponents.
pub fn common_denominator<'a>(exps: impl IntoIterator<Item = &'a Exponent>) -> i64 {
    exps.into_iter().fold(1i64, |acc, e| acc.lcm(&e.denom()))
}

impl From<i64> for Exponent {
    fn from(n: i64) -> Self {
        Exponent::int(n)
    }
}

impl From<Ratio<i64>> for Exponent {
    fn from(r: Ratio<i64>) -> Self {
        Exponent(r)
    }
}

impl Add for Exponent {
    type Output = Exponent;
    fn add(self, rhs: Exponent) -> Exponent {
        Exponent(self.0 + rhs.0)
    }
}

impl Add<i64> for Exponent {
    type Output = Exponent;
    fn add(self, rhs: i64) -> Exponent {
        Exponent(self.0 + rhs)
    }
}

impl AddAssign for Exponent {
    fn add_assign(&mut self, rhs: Exponent) {
        self.0 += rhs.0;
    }
}

impl Sub for Exponent {
    type Output = Exponent;
    fn sub(self, rhs: Exponent) -> Exponent {
        Exponent(self.0 - rhs.0)
    }
}

impl Sub<i64> for Exponent {
    type Output = Exponent;
    fn sub(self, rhs: i64) -> Exponent {
        Exponent(self.0 - rhs)
    }
}

impl SubAssign for Exponent {
    fn sub_assign(&mut self, rhs: Exponent) {
        self.0 -= rhs.0;
    }
}

impl Neg for Exponent {
    type Output = Exponent;
    fn neg(self) -> Exponent {
        Exponent(-self.0)
    }
}

impl Mul for Exponent {
    type Output = Exponent;
    fn mul(self, rhs: Exponent) -> Exponent {
        Exponent(self.0 * rhs.0)
    }
}

impl Mul<i64> for Exponent {
    type Output = Exponent;
    fn mul(self, rhs: i64) -> Exponent {
        Exponent(self.0 * rhs)
    }
}

impl Div for Exponent {
    type Output = Exponent;
    fn div(self, rhs: Exponent) -> Exponent {
        Exponent(self.0 / rhs.0)
    }
}

impl Div<i64> for Exponent {
    type Output = Exponent;
    fn div(self, rhs: i64) -> Exponent {
        Exponent(self.0 / rhs)
    }
}

impl Sum for Exponent {
    fn sum<I: Iterator<Item = Exponent>>(iter: I) -> Exponent {
        iter.fold(Exponent::ZERO, |a, b| a + b)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Exponent {
    type Err = QError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || QError::Malformed(format!("bad exponent `{s}`"));
        match s.split_once('/') {
            Some((n, d)) => {
                let n: i64 = n.trim().parse().map_err(|_| bad())?;
                let d: i64 = d.trim().parse().map_err(|_| bad())?;
                if d == 0 {
                    return Err(bad());
                }
                Ok(Exponent::new(n, d))
            }
            None => s.parse::<i64>().map(Exponent::int).map_err(|_| bad()),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        [self.numer(), self.denom()].serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let [n, d] = <[i64; 2]>::deserialize(deserializer)?;
        if d == 0 {
            return Err(serde::de::Error::custom("zero exponent denominator"));
        }
        Ok(Exponent::new(n, d))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduced_with_positive_denominator() {
        let e = Exponent::new(4, -6);
        assert_eq!((e.numer(), e.denom()), (-2, 3));
        assert_eq!(e.to_string(), "-2/3");
        assert_eq!("-2/3".parse::<Exponent>().unwrap(), e);
    }

    #[test]
    fn order_agrees_with_rationals() {
        let mut v = vec![Exponent::new(1, 2), Exponent::int(-1), Exponent::new(1, 3)];
        v.sort();
        assert_eq!(v, vec![Exponent::int(-1), Exponent::new(1, 3), Exponent::new(1, 2)]);
    }

    #[test]
    fn fractional_parts() {
        assert_eq!(Exponent::new(1, 2).fract_part(), Exponent::new(1, 2));
        assert_eq!(Exponent::new(-1, 2).fract_part(), Exponent::new(1, 2));
        assert_eq!(Exponent::int(3).fract_part(), Exponent::ZERO);
    }
}
