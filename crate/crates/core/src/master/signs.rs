//! Exhaustive check of the two sign identities used to match the expanded
//! Appell-Lerch terms with the split theta-quotient terms.

use serde::Serialize;

use crate::hecke::sg;
use crate::series::VerificationStatus;

/// One point where an identity fails.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SignCounterexample {
    /// 1 for `sg(nr+k+nw+⌊n/2⌋)`, 2 for `sg(ns+k-nw-⌊n/2⌋-1)`.
    pub identity: u8,
    pub n: i64,
    pub k: i64,
    pub r: i64,
    pub s: i64,
    pub w: i64,
    pub lhs: i64,
    pub rhs: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SignIdReport {
    pub status: VerificationStatus,
    pub cases: u64,
    pub first_counterexample: Option<SignCounterexample>,
    pub counterexamples: u64,
}

impl SignIdReport {
    pub fn is_verified(&self) -> bool {
        self.status == VerificationStatus::Verified
    }
}

/// Checks both identities for all `r, s, w` in `[-bound, bound]` and every
/// `k` in `[0, n)`.
pub fn lemma_sign_ids(n: i64, bound: i64) -> SignIdReport {
    lemma_sign_ids_perturbed(n, bound, 0)
}

/// As [`lemma_sign_ids`] with `shift` added inside the left-hand `sg`; any
/// nonzero shift must produce counterexamples.
pub fn lemma_sign_ids_perturbed(n: i64, bound: i64, shift: i64) -> SignIdReport {
    assert!(n >= 1, "n must be positive");
    let half = n / 2;
    let mut cases = 0;
    let mut bad = 0;
    let mut first = None;
    let mut record = |c: SignCounterexample| {
        bad += 1;
        first.get_or_insert(c);
    };
    for k in 0..n {
        let low = k <= half;
        for w in -bound..=bound {
            for r in -bound..=bound {
                cases += 1;
                let lhs = sg(n * r + k + n * w + half + shift);
                let rhs = if low { -sg(-w - 1 - r) } else { -sg(-w - 2 - r) };
                if lhs != rhs {
                    record(SignCounterexample { identity: 1, n, k, r, s: 0, w, lhs, rhs });
                }
            }
            for s in -bound..=bound {
                cases += 1;
                let lhs = sg(n * s + k - n * w - half - 1 + shift);
                let rhs = if low { -sg(w - s) } else { -sg(w - 1 - s) };
                if lhs != rhs {
                    record(SignCounterexample { identity: 2, n, k, r: 0, s, w, lhs, rhs });
                }
            }
        }
    }
    SignIdReport {
        status: if bad == 0 { VerificationStatus::Verified } else { VerificationStatus::Mismatch },
        cases,
        first_counterexample: first,
        counterexamples: bad,
    }
}
