use std::fmt;
use std::time::Duration;

use super::exponent::Exponent;
use super::Coefficient;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum VerificationStatus {
    Verified,
    Mismatch,
    Inconclusive,
}

impl VerificationStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            VerificationStatus::Verified => "Verified",
            VerificationStatus::Mismatch => "Mismatch",
            VerificationStatus::Inconclusive => "Inconclusive",
        }
    }
}

impl fmt::Display for VerificationStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The smallest exponent at which two series disagree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub exponent: Exponent,
    pub lhs: Coefficient,
    pub rhs: Coefficient,
}

/// Outcome of an exact coefficient comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub status: VerificationStatus,
    /// Coefficients were compared strictly below this exponent.
    pub checked_to: Exponent,
    pub first_mismatch: Option<Mismatch>,
    pub elapsed: Duration,
}

impl VerificationReport {
    pub fn is_verified(&self) -> bool {
        self.status == VerificationStatus::Verified
    }

    pub fn with_elapsed(mut self, elapsed: Duration) -> Self {
        self.elapsed = elapsed;
        self
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.first_mismatch {
            None => write!(f, "{} to O(q^({}))", self.status, self.checked_to),
            Some(m) => write!(f, "{} at q^({}): {} vs {}", self.status, m.exponent, m.lhs, m.rhs),
        }
    }
}
