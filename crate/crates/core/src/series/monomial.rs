use std::fmt;
use std::ops::{Mul, Neg};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::exponent::Exponent;
use super::Coefficient;
use crate::error::{QError, Result};

/// `coeff * q^exp` with a nonzero rational coefficient.
///
/// This is the stand-in for a complex parameter: every `x`, `y`, `z` and every
/// theta or Appell-Lerch base is specialized to one of these.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SignedMonomial {
    coeff: Coefficient,
    exp: Exponent,
}

impl SignedMonomial {
    pub fn new(coeff: Coefficient, exp: Exponent) -> Result<Self> {
        if coeff.is_zero() {
            return Err(QError::InvalidParams("monomial coefficient must be nonzero".into()));
        }
        Ok(SignedMonomial { coeff, exp })
    }

    /// `q^exp`.
    pub fn q_pow(exp: impl Into<Exponent>) -> Self {
        SignedMonomial { coeff: Coefficient::one(), exp: exp.into() }
    }

    /// `sign * q^exp` with integer coefficient; panics on zero.
    pub fn from_int(coeff: i64, exp: impl Into<Exponent>) -> Self {
        assert!(coeff != 0, "monomial coefficient must be nonzero");
        SignedMonomial { coeff: Coefficient::from_integer(BigInt::from(coeff)), exp: exp.into() }
    }

    pub fn one() -> Self {
        Self::q_pow(0)
    }

    pub fn coeff(&self) -> &Coefficient {
        &self.coeff
    }

    pub fn exp(&self) -> Exponent {
        self.exp
    }

    /// The q-order of the monomial; independent of the coefficient.
    pub fn q_order(&self) -> Exponent {
        self.exp
    }

    pub fn is_one(&self) -> bool {
        self.exp.is_zero() && self.coeff.is_one()
    }

    pub fn recip(&self) -> Self {
        SignedMonomial { coeff: self.coeff.recip(), exp: -self.exp }
    }

    pub fn scale(&self, c: &Coefficient) -> Result<Self> {
        SignedMonomial::new(&self.coeff * c, self.exp)
    }

    pub fn shift(&self, e: impl Into<Exponent>) -> Self {
        SignedMonomial { coeff: self.coeff.clone(), exp: self.exp + e.into() }
    }

    /// Integer power; always defined.
    pub fn powi(&self, k: i64) -> Self {
        let coeff = pow_rational(&self.coeff, k);
        SignedMonomial { coeff, exp: self.exp * k }
    }

    /// Rational power. Non-integral powers require a positive coefficient with
    /// a rational root of the needed degree.
    pub fn pow(&self, k: Exponent) -> Result<Self> {
        if k.is_integer() {
            return Ok(self.powi(k.numer()));
        }
        if self.coeff.is_negative() {
            return Err(QError::HalfPowerOfNegative);
        }
        let root_deg = k.denom() as u32;
        let numer_root = exact_root(self.coeff.numer(), root_deg);
        let denom_root = exact_root(self.coeff.denom(), root_deg);
        match (numer_root, denom_root) {
            (Some(n), Some(d)) => {
                let root = Coefficient::new(n, d);
                Ok(SignedMonomial { coeff: pow_rational(&root, k.numer()), exp: self.exp * k })
            }
            _ => Err(QError::UnrepresentablePower(format!("({self})^({k})"))),
        }
    }

    /// Returns `Some(k)` when `self == base^k` exactly for an integer `k`.
    pub fn integral_power_of(&self, base: &SignedMonomial) -> Option<i64> {
        if base.exp.is_zero() {
            return None;
        }
        let k = self.exp / base.exp;
        if !k.is_integer() {
            return None;
        }
        let k = k.numer();
        (pow_rational(&base.coeff, k) == self.coeff).then_some(k)
    }
}

fn exact_root(n: &BigInt, deg: u32) -> Option<BigInt> {
    let r = n.nth_root(deg);
    (num_traits::pow(r.clone(), deg as usize) == *n).then_some(r)
}

/// `c^k` for any integer `k` (c nonzero when k < 0).
pub(crate) fn pow_rational(c: &Coefficient, k: i64) -> Coefficient {
    let base = if k < 0 { c.recip() } else { c.clone() };
    num_traits::pow(base, k.unsigned_abs() as usize)
}

impl Mul for &SignedMonomial {
    type Output = SignedMonomial;
    fn mul(self, rhs: &SignedMonomial) -> SignedMonomial {
        SignedMonomial { coeff: &self.coeff * &rhs.coeff, exp: self.exp + rhs.exp }
    }
}

impl Mul for SignedMonomial {
    type Output = SignedMonomial;
    fn mul(self, rhs: SignedMonomial) -> SignedMonomial {
        &self * &rhs
    }
}

impl Neg for SignedMonomial {
    type Output = SignedMonomial;
    fn neg(self) -> SignedMonomial {
        SignedMonomial { coeff: -self.coeff, exp: self.exp }
    }
}

impl Neg for &SignedMonomial {
    type Output = SignedMonomial;
    fn neg(self) -> SignedMonomial {
        -(self.clone())
    }
}

impl fmt::Display for SignedMonomial {
    /// `q^(e)`, `-q^(e)` or `c*q^(e)`; parses back with [`FromStr`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeff.is_one() {
            write!(f, "q^({})", self.exp)
        } else if (-&self.coeff).is_one() {
            write!(f, "-q^({})", self.exp)
        } else {
            write!(f, "{}*q^({})", self.coeff, self.exp)
        }
    }
}

impl fmt::Debug for SignedMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for SignedMonomial {
    type Err = QError;

    /// Accepts `q`, `q^3`, `q^-2`, `q^(1/2)`, `-q^(1/2)`, `3*q^2`, `-1/2*q^(3/2)`.
    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || QError::Malformed(format!("bad monomial `{s}`"));
        let qpos = t.find('q').ok_or_else(bad)?;
        let (head, tail) = t.split_at(qpos);
        let coeff: Coefficient = match head {
            "" => Coefficient::one(),
            "-" => -Coefficient::one(),
            h => {
                let h = h.strip_suffix('*').ok_or_else(bad)?;
                parse_rational(h).ok_or_else(bad)?
            }
        };
        let tail = &tail[1..];
        let exp = if tail.is_empty() {
            Exponent::ONE
        } else {
            let e = tail.strip_prefix('^').ok_or_else(bad)?;
            let e = e.strip_prefix('(').and_then(|e| e.strip_suffix(')')).unwrap_or(e);
            e.parse::<Exponent>().map_err(|_| bad())?
        };
        SignedMonomial::new(coeff, exp)
    }
}

/// Parses `n` or `n/d` with arbitrary-size integers.
pub(crate) fn parse_rational(s: &str) -> Option<Coefficient> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Coefficient::new(n, d))
        }
        None => s.parse::<BigInt>().ok().map(Coefficient::from_integer),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mono(s: &str) -> SignedMonomial {
        s.parse().unwrap()
    }

    #[test]
    fn integer_power_squares_sign_away() {
        assert_eq!(mono("-q^3").pow(Exponent::int(2)).unwrap(), mono("q^6"));
    }

    #[test]
    fn half_power_of_positive() {
        assert_eq!(mono("q^3").pow(Exponent::new(1, 2)).unwrap(), mono("q^(3/2)"));
        assert_eq!(mono("4/9*q^1").pow(Exponent::new(1, 2)).unwrap(), mono("2/3*q^(1/2)"));
    }

    #[test]
    fn half_power_of_negative_is_refused() {
        assert_eq!(mono("-q^1").pow(Exponent::new(1, 2)), Err(QError::HalfPowerOfNegative));
        assert!(matches!(mono("2*q^1").pow(Exponent::new(1, 2)), Err(QError::UnrepresentablePower(_))));
    }

    #[test]
    fn q_order_ignores_coefficient() {
        assert_eq!(mono("-7/3*q^(5/2)").q_order(), Exponent::new(5, 2));
    }

    #[test]
    fn integral_power_detection() {
        let base = mono("-q^5");
        assert_eq!(mono("q^10").integral_power_of(&base), Some(2));
        assert_eq!(mono("-q^15").integral_power_of(&base), Some(3));
        assert_eq!(mono("q^15").integral_power_of(&base), None);
        assert_eq!(mono("q^0").integral_power_of(&base), Some(0));
        assert_eq!(mono("-q^-5").integral_power_of(&base), Some(-1));
    }

    #[test]
    fn display_round_trip() {
        for s in ["q^(1)", "-q^(1/2)", "3*q^(-2)", "-1/2*q^(3/2)"] {
            assert_eq!(mono(s).to_string(), s);
        }
        assert_eq!(mono("q"), mono("q^1"));
        assert!("0*q^1".parse::<SignedMonomial>().is_err());
    }
}
