//! Exact truncated Laurent series in q.
//!
//! Exponents are exact rationals ([`Exponent`]), coefficients are
//! arbitrary-precision rationals ([`Coefficient`]); there is no floating point
//! anywhere in the arithmetic. A [`QSeries`] carries its own precision horizon
//! and every operation propagates it, so a result is always known exactly
//! modulo `q^precision`.

mod exponent;
mod monomial;
mod qseries;
mod report;

pub use exponent::{binom2, common_denominator, Exponent};
pub(crate) use monomial::pow_rational;
pub use monomial::SignedMonomial;
pub use qseries::{from_int_coeffs, refine, QSeries, SeriesJson};
pub use report::{Mismatch, VerificationReport, VerificationStatus};

/// Exact rational coefficient.
pub type Coefficient = num_rational::BigRational;

/// `n` as a coefficient.
pub fn coeff(n: i64) -> Coefficient {
    Coefficient::from_integer(n.into())
}

/// `n/d` as a coefficient.
pub fn ratio(n: i64, d: i64) -> Coefficient {
    Coefficient::new(n.into(), d.into())
}
