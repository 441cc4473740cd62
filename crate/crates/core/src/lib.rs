//! Exact truncated q-series engine for theta functions, Appell-Lerch sums and
//! Hecke-type double sums.
//!
//! Parameters such as `x`, `y` and `z` are specialized to signed monomials
//! `c * q^e`, which turns every object into a Laurent series in a fractional
//! power of q. Identities are then checked by exact coefficient comparison
//! below a truncation horizon.

pub mod appell;
pub mod error;
pub mod eulerian;
pub mod hecke;
pub mod master;
pub mod series;
pub mod theta;

pub use error::{QError, Result};
pub use series::{Coefficient, Exponent, QSeries, SignedMonomial, VerificationReport, VerificationStatus};
