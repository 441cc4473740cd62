//! q-order versions of the convergence windows used when the master formula
//! is proved by expanding each side into multiple sums.
//!
//! Under `x = c q^{ex}`, `y = c' q^{ey}` an analytic condition `|q^a| < |m| < |q^b|`
//! on a monomial `m` becomes `b < ord(m) < a`.

use serde::Serialize;

use super::{MasterParams, Specialization};
use crate::series::{binom2, Exponent};

/// `lo < value < hi` for one concluded window.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WindowCheck {
    pub index: i64,
    pub lo: Exponent,
    pub value: Exponent,
    pub hi: Exponent,
    pub holds: bool,
}

impl WindowCheck {
    fn new(index: i64, lo: Exponent, value: Exponent, hi: Exponent) -> Self {
        WindowCheck { index, lo, value, hi, holds: lo < value && value < hi }
    }
}

/// Hypotheses and conclusions, for `x^{-n} y^{n+p}` and with `x`, `y` swapped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WindowReport {
    /// `-p(n+p)/2 < (n+p) ey - n ex < p(3n+p)/2`
    pub hypothesis_xy: bool,
    /// the same with `x` and `y` exchanged
    pub hypothesis_yx: bool,
    /// theta-quotient windows, one per `r` in `[0, p)`, for each orientation
    pub quotient_xy: Vec<WindowCheck>,
    pub quotient_yx: Vec<WindowCheck>,
    /// Appell-Lerch windows, one per `k` in `[0, n)`; only stated for odd `n`
    pub appell_xy: Option<Vec<WindowCheck>>,
    pub appell_yx: Option<Vec<WindowCheck>>,
}

impl WindowReport {
    pub fn hypotheses_hold(&self) -> bool {
        self.hypothesis_xy && self.hypothesis_yx
    }

    /// Every evaluated conclusion holds.
    pub fn conclusions_hold(&self) -> bool {
        let all = |v: &[WindowCheck]| v.iter().all(|c| c.holds);
        all(&self.quotient_xy)
            && all(&self.quotient_yx)
            && self.appell_xy.as_deref().is_none_or(all)
            && self.appell_yx.as_deref().is_none_or(all)
    }
}

/// `(n+p) ord(b) - n ord(a)`, the order of `a^{-n} b^{n+p}`.
fn mixed_order(mp: MasterParams, a: Exponent, b: Exponent) -> Exponent {
    b * (mp.n + mp.p) - a * mp.n
}

fn hypothesis(mp: MasterParams, l: Exponent) -> bool {
    let (n, p) = (mp.n, mp.p);
    Exponent::new(-p * (n + p), 2) < l && l < Exponent::new(p * (3 * n + p), 2)
}

fn quotient_windows(mp: MasterParams, l: Exponent) -> Vec<WindowCheck> {
    let (n, p, d) = (mp.n, mp.p, mp.d());
    (0..p)
        .map(|r| WindowCheck::new(r, Exponent::ZERO, Exponent::new(p * (n + p), 2) + d * r + l, Exponent::int(p * d)))
        .collect()
}

fn appell_windows(mp: MasterParams, l: Exponent) -> Option<Vec<WindowCheck>> {
    let (n, p, d) = (mp.n, mp.p, mp.d());
    if n % 2 == 0 {
        return None;
    }
    let h = (n - 1) / 2;
    let m = n * (n * p + binom2(p + 1));
    Some(
        (0..n)
            .map(|k| {
                let shift = if k <= h { 0 } else { n * d };
                WindowCheck::new(k, Exponent::ZERO, Exponent::int(m + shift - k * d) - l, Exponent::int(n * d))
            })
            .collect(),
    )
}

/// Evaluates the window hypotheses and every concluded window.
pub fn check_windows(mp: MasterParams, spec: &Specialization) -> WindowReport {
    let (ex, ey) = (spec.x.exp(), spec.y.exp());
    let lxy = mixed_order(mp, ex, ey);
    let lyx = mixed_order(mp, ey, ex);
    WindowReport {
        hypothesis_xy: hypothesis(mp, lxy),
        hypothesis_yx: hypothesis(mp, lyx),
        quotient_xy: quotient_windows(mp, lxy),
        quotient_yx: quotient_windows(mp, lyx),
        appell_xy: appell_windows(mp, lxy),
        appell_yx: appell_windows(mp, lyx),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::SignedMonomial;

    fn spec(x: &str, y: &str) -> Specialization {
        Specialization::new(x.parse().unwrap(), y.parse().unwrap())
    }

    #[test]
    fn in_window_spec_satisfies_every_conclusion() {
        let mp = MasterParams::new(1, 2).unwrap();
        let r = check_windows(mp, &spec("q", "q"));
        assert!(r.hypotheses_hold());
        assert!(r.conclusions_hold());
        assert_eq!(r.quotient_xy.len(), 2);
        assert_eq!(r.appell_xy.as_ref().map(Vec::len), Some(1));
    }

    #[test]
    fn hypothesis_failure_is_flagged() {
        let mp = MasterParams::new(1, 2).unwrap();
        let r = check_windows(mp, &spec("q", "q^3"));
        assert!(!r.hypothesis_xy);
        assert!(!r.hypotheses_hold());
    }

    #[test]
    fn hypotheses_imply_conclusions() {
        // a grid of exponents; whenever both hypotheses hold, so do the
        // conclusions (for odd n the Appell-Lerch windows too)
        for (n, p) in [(1, 1), (1, 2), (3, 2), (2, 1), (3, 1), (1, 3), (5, 2)] {
            let mp = MasterParams::new(n, p).unwrap();
            for a in -24..=24 {
                for b in -24..=24 {
                    let x = SignedMonomial::q_pow(Exponent::new(a, 4));
                    let y = SignedMonomial::q_pow(Exponent::new(b, 4));
                    let r = check_windows(mp, &Specialization::new(x, y));
                    if r.hypotheses_hold() {
                        assert!(r.conclusions_hold(), "(n,p)=({n},{p}) at ({a}/4, {b}/4)");
                    }
                }
            }
        }
    }

    #[test]
    fn n_one_has_a_single_k() {
        let mp = MasterParams::new(1, 3).unwrap();
        assert_eq!(check_windows(mp, &spec("q", "q")).appell_yx.unwrap().len(), 1);
        assert!(check_windows(MasterParams::new(2, 1).unwrap(), &spec("q", "q")).appell_xy.is_none());
    }
}
