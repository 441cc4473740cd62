//! Hecke-type double sums
//! `f_{a,b,c}(x,y,q) = Σ_{sg(r)=sg(s)} sg(r) (-1)^{r+s} x^r y^s q^{a C(r,2) + b rs + c C(s,2)}`
//! and the bilateral `₁ψ₁` summation they are built from.

use std::time::Instant;

use crate::error::{QError, Result};
use crate::eulerian::{pochhammer, Length, PochhammerSpec};
use crate::series::{binom2, pow_rational, refine, Coefficient, Exponent, QSeries, SignedMonomial, VerificationReport};
use crate::theta::{big_j, theta_j, JVariant, ThetaSpec};

/// `1` for `r >= 0`, `-1` otherwise.
pub fn sg(r: i64) -> i64 {
    if r >= 0 {
        1
    } else {
        -1
    }
}

/// `(sg(r) + sg(s)) / 2`: zero on the mixed-sign quadrants.
pub fn sg2(r: i64, s: i64) -> i64 {
    (sg(r) + sg(s)) / 2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HeckeParams {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl HeckeParams {
    pub fn new(a: i64, b: i64, c: i64) -> Result<Self> {
        if a < 1 || b < 1 || c < 1 {
            return Err(QError::InvalidParams(format!("f_{{{a},{b},{c}}} needs positive subscripts")));
        }
        Ok(HeckeParams { a, b, c })
    }

    /// `b² - ac`.
    pub fn discriminant(&self) -> i64 {
        self.b * self.b - self.a * self.c
    }
}

/// Minimum over integer `s` in `range` of the convex `c C(s,2) + s e`.
fn min_convex_row(c: i64, e: Exponent, quadrant_nonneg: bool) -> Exponent {
    let f = |s: i64| Exponent::int(c * binom2(s)) + e * s;
    let vertex = (Exponent::new(1, 2) - e / c).floor();
    let clamp = |s: i64| if quadrant_nonneg { s.max(0) } else { s.min(-1) };
    f(clamp(vertex)).min(f(clamp(vertex + 1)))
}

/// Scans one convex row `s ↦ E(s)` over a half-line quadrant, outward from
/// `fl = floor(vertex)`: upward from `fl + 1` and downward from `fl`, so each
/// direction is monotone. Calls `emit` for every `s` with `E(s) < bound`.
fn scan_row(
    fl: i64,
    nonneg: bool,
    bound: Exponent,
    exp: impl Fn(i64) -> Exponent,
    mut emit: impl FnMut(i64, Exponent),
) {
    let (lo, hi) = if nonneg { (0, i64::MAX) } else { (i64::MIN, -1) };
    let mut s = (fl + 1).max(lo);
    while s <= hi && exp(s) < bound {
        emit(s, exp(s));
        s += 1;
    }
    let mut s = fl.min(hi);
    while s >= lo && exp(s) < bound {
        emit(s, exp(s));
        s -= 1;
    }
}

/// `f_{a,b,c}(x, y, q)` modulo `q^precision`.
pub fn f_abc(p: HeckeParams, x: &SignedMonomial, y: &SignedMonomial, precision: Exponent) -> Result<QSeries> {
    f_abc_with_slack(p, x, y, precision, Exponent::ZERO)
}

/// As [`f_abc`], but every scan runs to `precision + slack` before
/// truncating; the result must not depend on `slack`.
pub fn f_abc_with_slack(
    p: HeckeParams,
    x: &SignedMonomial,
    y: &SignedMonomial,
    precision: Exponent,
    slack: Exponent,
) -> Result<QSeries> {
    let HeckeParams { a, b, c } = p;
    if a < 1 || b < 1 || c < 1 {
        return Err(QError::InvalidParams("f_abc needs positive subscripts".into()));
    }
    let (ex, ey) = (x.exp(), y.exp());
    let bound = precision + slack;
    let neg_x = -x.coeff().clone();
    let neg_y = -y.coeff().clone();
    let mut terms: Vec<(Exponent, Coefficient)> = Vec::new();
    let row_part = |r: i64| Exponent::int(a * binom2(r)) + ex * r;
    for nonneg in [true, false] {
        // On a same-sign quadrant b r s >= 0, so a C(r,2) + r ex + min_s (c C(s,2) + s ey)
        // bounds row r from below; it is convex in r, so once it reaches the
        // bound past its vertex no later row can contribute.
        let s_floor = min_convex_row(c, ey, nonneg);
        let r_vertex = (Exponent::new(1, 2) - ex / a).floor();
        let mut r: i64 = if nonneg { 0 } else { -1 };
        let dir = if nonneg { 1 } else { -1 };
        let mut steps = 0u64;
        loop {
            let past_vertex = if nonneg { r > r_vertex } else { r <= r_vertex };
            if past_vertex && row_part(r) + s_floor >= bound {
                break;
            }
            steps += 1;
            if steps > 10_000_000 {
                return Err(QError::NonterminatingEnumeration("f_abc row scan".into()));
            }
            let weight = Coefficient::from_integer(sg(r).into());
            let xr = &weight * pow_rational(&neg_x, r);
            let base = row_part(r);
            let exp = |s: i64| base + Exponent::int(b * r * s + c * binom2(s)) + ey * s;
            let vertex = (Exponent::new(1, 2) - (ey + b * r) / c).floor();
            scan_row(vertex, nonneg, bound, exp, |s, e| {
                terms.push((e, &xr * pow_rational(&neg_y, s)));
            });
            r += dir;
        }
    }
    Ok(QSeries::from_terms(terms, precision))
}

fn check_unit_window(name: &str, m: &SignedMonomial) -> Result<()> {
    let e = m.exp();
    if e.is_positive() && e < Exponent::ONE {
        Ok(())
    } else {
        Err(QError::WindowViolation(format!("need 0 < ord({name}) < 1, got {e}")))
    }
}

/// `Σ_{r,s} sg(r,s) q^{rs} x^r y^s` for `0 < ord(x), ord(y) < 1`.
pub fn onepsi_corollary_lhs(x: &SignedMonomial, y: &SignedMonomial, precision: Exponent) -> Result<QSeries> {
    check_unit_window("x", x)?;
    check_unit_window("y", y)?;
    let (ex, ey) = (x.exp(), y.exp());
    let mut terms = Vec::new();
    // r, s >= 0: rs + r ex + s ey grows in both indices.
    let mut r = 0i64;
    while ex * r < precision {
        let mut s = 0i64;
        loop {
            let e = Exponent::int(r * s) + ex * r + ey * s;
            if e >= precision {
                break;
            }
            terms.push((e, pow_rational(x.coeff(), r) * pow_rational(y.coeff(), s)));
            s += 1;
        }
        r += 1;
    }
    // r = -u, s = -v with u, v >= 1: u(v - ex) - v ey grows in v, and its row
    // minimum u(1 - ex) - ey grows in u.
    let mut u = 1i64;
    while (Exponent::ONE - ex) * u - ey < precision {
        let mut v = 1i64;
        loop {
            let e = Exponent::int(u * v) - ex * u - ey * v;
            if e >= precision {
                break;
            }
            terms.push((e, -(pow_rational(x.coeff(), -u) * pow_rational(y.coeff(), -v))));
            v += 1;
        }
        u += 1;
    }
    Ok(QSeries::from_terms(terms, precision))
}

/// `J_1³ j(xy;q) / (j(x;q) j(y;q))`, the closed form of the corollary sum.
pub fn onepsi_corollary_rhs(x: &SignedMonomial, y: &SignedMonomial, precision: Exponent) -> Result<QSeries> {
    let q = SignedMonomial::q_pow(1);
    let jxy = ThetaSpec::new(x * y, q.clone())?;
    let jx = ThetaSpec::new(x.clone(), q.clone())?;
    let jy = ThetaSpec::new(y.clone(), q)?;
    refine(precision, |wp| {
        let num = &big_j(0, 1, JVariant::Eta, wp)?.powi(3)? * &theta_j(&jxy, wp)?;
        num.div(&theta_j(&jx, wp)?)?.div(&theta_j(&jy, wp)?)
    })
}

fn check_onepsi_window(a: &SignedMonomial, b: &SignedMonomial, x: &SignedMonomial) -> Result<()> {
    let (ea, eb, ex) = (a.exp(), b.exp(), x.exp());
    if ex.is_positive() && ex < eb - ea {
        Ok(())
    } else {
        Err(QError::WindowViolation(format!("need 0 < ord(x) < ord(b/a); got ord(x) = {ex}, ord(b/a) = {}", eb - ea)))
    }
}

fn nonunit(what: &str) -> impl Fn(QError) -> QError + '_ {
    move |_| QError::NonUnitFactor(format!("{what} has a vanishing factor"))
}

/// The bilateral sum `Σ_n (a)_n / (b)_n x^n` inside its window
/// `0 < ord(x) < ord(b) - ord(a)`.
pub fn onepsi_lhs(a: &SignedMonomial, b: &SignedMonomial, x: &SignedMonomial, precision: Exponent) -> Result<QSeries> {
    check_onepsi_window(a, b, x)?;
    let q = SignedMonomial::q_pow(1);
    let (ea, eb, ex) = (a.exp(), b.exp(), x.exp());
    let neg = |e: Exponent| e.min(Exponent::ZERO);
    refine(precision, |wp| {
        let mut sum = QSeries::zero(wp);
        // n >= 0: term_{n+1} = term_n x (1 - a q^n) / (1 - b q^n). Its order is
        // exactly n ex + Σ_{k<n} (neg(ea+k) - neg(eb+k)); once both arguments
        // have positive order it grows by ex per step.
        let settled = (-ea).ceil().max((-eb).ceil()).max(0);
        let mut term = QSeries::one(wp);
        let mut order = Exponent::ZERO;
        let mut n = 0i64;
        while n <= settled || order < wp {
            sum = &sum + &term;
            let qn = q.powi(n);
            term =
                term.mul_monomial(x).mul_one_minus(&(a * &qn)).div_one_minus(&(b * &qn)).map_err(nonunit("(b)_n"))?;
            order += ex + neg(ea + n) - neg(eb + n);
            n += 1;
        }
        // n = -m < 0: (a)_{-m} / (b)_{-m} = Π_{k=1}^m (1 - b q^{-k}) / (1 - a q^{-k}).
        // Past the settled point the order grows by ord(b/a) - ex > 0 per step.
        let settled = ea.floor().max(eb.floor()).max(0) + 1;
        let mut term = QSeries::one(wp);
        let mut order = Exponent::ZERO;
        let mut m = 1i64;
        loop {
            let qk = q.powi(-m);
            term = term
                .mul_monomial(&x.recip())
                .mul_one_minus(&(b * &qk))
                .div_one_minus(&(a * &qk))
                .map_err(nonunit("(a)_{-n}"))?;
            order += -ex + neg(eb - m) - neg(ea - m);
            if m > settled && order >= wp {
                break;
            }
            sum = &sum + &term;
            m += 1;
        }
        Ok(sum)
    })
}

/// `(b/a, q/(ax), ax, q)_∞ / (b, b/(ax), q/a, x)_∞`.
pub fn onepsi_rhs(a: &SignedMonomial, b: &SignedMonomial, x: &SignedMonomial, precision: Exponent) -> Result<QSeries> {
    let q = SignedMonomial::q_pow(1);
    let ax = a * x;
    let inf = |m: SignedMonomial| PochhammerSpec::new(m, q.clone(), Length::Infinite);
    let num = [inf(b * &a.recip())?, inf(&q * &ax.recip())?, inf(ax.clone())?, inf(q.clone())?];
    let den = [inf(b.clone())?, inf(b * &ax.recip())?, inf(&q * &a.recip())?, inf(x.clone())?];
    refine(precision, |wp| {
        let mut n = QSeries::one(wp);
        for s in &num {
            n = &n * &pochhammer(s, wp)?;
        }
        let mut d = QSeries::one(wp);
        for s in &den {
            d = &d * &pochhammer(s, wp)?;
        }
        n.div(&d)
    })
}

/// Checks the `₁ψ₁` summation for one specialization.
pub fn onepsi_general(
    a: &SignedMonomial,
    b: &SignedMonomial,
    x: &SignedMonomial,
    precision: Exponent,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let lhs = onepsi_lhs(a, b, x, precision)?;
    let rhs = onepsi_rhs(a, b, x, precision)?;
    Ok(lhs.compare_to(&rhs, precision).with_elapsed(start.elapsed()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{coeff, from_int_coeffs};
    use proptest::prelude::*;

    fn p(n: i64) -> Exponent {
        Exponent::int(n)
    }

    fn mono(s: &str) -> SignedMonomial {
        s.parse().unwrap()
    }

    /// Plain box enumeration of the defining double sum.
    fn f_oracle(h: HeckeParams, x: &SignedMonomial, y: &SignedMonomial, prec: i64, radius: i64) -> QSeries {
        let mut terms = Vec::new();
        for r in -radius..=radius {
            for s in -radius..=radius {
                if sg(r) != sg(s) {
                    continue;
                }
                let e = Exponent::int(h.a * binom2(r) + h.b * r * s + h.c * binom2(s)) + x.exp() * r + y.exp() * s;
                let c = pow_rational(&-x.coeff().clone(), r) * pow_rational(&-y.coeff().clone(), s) * coeff(sg(r));
                terms.push((e, c));
            }
        }
        QSeries::from_terms(terms, p(prec))
    }

    #[test]
    fn sign_functions() {
        assert_eq!(sg(0), 1);
        assert_eq!(sg(-1), -1);
        for r in -50..=50 {
            assert_eq!(sg(-1 - r), -sg(r));
        }
        assert_eq!(sg2(3, 5), 1);
        assert_eq!(sg2(1, -2), 0);
        assert_eq!(sg2(-1, -1), -1);
    }

    #[test]
    fn f121_at_q() {
        let q = mono("q");
        let h = HeckeParams::new(1, 2, 1).unwrap();
        let s = f_abc(h, &q, &q, p(7)).unwrap();
        assert_eq!(s, from_int_coeffs(&[1, -2, -1, 2, 1, 2, -2], 7));
        assert_eq!(s, f_oracle(h, &q, &q, 7, 20));
    }

    #[test]
    fn starts_with_one() {
        let s = f_abc(HeckeParams::new(2, 3, 1).unwrap(), &mono("q^(1/2)"), &mono("-q^2"), p(5)).unwrap();
        assert_eq!(s.leading_term().map(|(e, c)| (e, c.clone())), Some((Exponent::ZERO, coeff(1))));
    }

    #[test]
    fn rejects_nonpositive_subscripts() {
        assert!(HeckeParams::new(0, 1, 1).is_err());
        assert_eq!(HeckeParams::new(1, 3, 2).unwrap().discriminant(), 7);
    }

    #[test]
    fn negative_linear_terms() {
        // large negative linear parts push the support away from the corner
        let h = HeckeParams::new(1, 2, 3).unwrap();
        let (x, y) = (mono("2*q^-3"), mono("-q^(-7/2)"));
        let s = f_abc(h, &x, &y, p(12)).unwrap();
        assert_eq!(s, f_oracle(h, &x, &y, 12, 40));
    }

    #[test]
    fn corollary_closed_form() {
        let (x, y) = (mono("q^(1/3)"), mono("q^(1/2)"));
        let lhs = onepsi_corollary_lhs(&x, &y, p(40)).unwrap();
        assert_eq!(lhs.coeff(Exponent::ZERO), coeff(1));
        assert!(lhs.compare(&onepsi_corollary_rhs(&x, &y, p(40)).unwrap()).is_verified());
        assert!(matches!(onepsi_corollary_lhs(&mono("q^2"), &y, p(5)), Err(QError::WindowViolation(_))));
    }

    #[test]
    fn corollary_is_regrouped_bilateral_sum() {
        // a = y, b = qy: Σ x^n (1-y)/(1-yq^n), i.e. (1-y) times the corollary sum.
        let (x, y) = (mono("q^(1/3)"), mono("-2*q^(1/2)"));
        let cor = onepsi_corollary_lhs(&x, &y, p(30)).unwrap();
        let b = &mono("q") * &y;
        let bilateral = onepsi_lhs(&y, &b, &x, p(30)).unwrap();
        assert!(cor.mul_one_minus(&y).compare(&bilateral).is_verified());
        assert!(onepsi_general(&y, &b, &x, p(30)).unwrap().is_verified());
    }

    #[test]
    fn general_bilateral_summation() {
        let r = onepsi_general(&mono("3*q^(-1/2)"), &mono("-q^(3/4)"), &mono("q^(1/2)"), p(30)).unwrap();
        assert!(r.is_verified(), "{r}");
        let r = onepsi_general(&mono("q^(1/5)"), &mono("2*q^(7/3)"), &mono("-q^(3/2)"), p(25)).unwrap();
        assert!(r.is_verified(), "{r}");
    }

    #[test]
    fn bilateral_window_boundary() {
        let (a, b) = (mono("q^(1/4)"), mono("q^(3/4)"));
        assert!(matches!(onepsi_general(&a, &b, &mono("2*q^(1/2)"), p(10)), Err(QError::WindowViolation(_))));
        assert!(matches!(onepsi_general(&a, &b, &mono("q^0"), p(10)), Err(QError::WindowViolation(_))));
    }

    fn arb_mono(lo: i64, hi: i64) -> impl Strategy<Value = SignedMonomial> {
        (prop::sample::select(vec![1i64, -1, 2, -2, 3]), lo..hi, 1i64..4)
            .prop_map(|(c, n, d)| SignedMonomial::new(coeff(c), Exponent::new(n, d)).unwrap())
    }

    fn arb_params() -> impl Strategy<Value = HeckeParams> {
        (1i64..4, 1i64..5, 1i64..4).prop_map(|(a, b, c)| HeckeParams::new(a, b, c).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]

        #[test]
        fn relabeling_symmetry(h in arb_params(), x in arb_mono(-6, 6), y in arb_mono(-6, 6)) {
            let swapped = HeckeParams::new(h.c, h.b, h.a).unwrap();
            prop_assert_eq!(f_abc(h, &x, &y, p(30)).unwrap(), f_abc(swapped, &y, &x, p(30)).unwrap());
        }

        #[test]
        fn doubling_the_scan_changes_nothing(h in arb_params(), x in arb_mono(-6, 6), y in arb_mono(-6, 6)) {
            let tight = f_abc(h, &x, &y, p(25)).unwrap();
            prop_assert_eq!(&tight, &f_abc_with_slack(h, &x, &y, p(25), p(25)).unwrap());
            prop_assert_eq!(tight, f_oracle(h, &x, &y, 25, 30));
        }

        #[test]
        fn corollary_in_window(xn in 1i64..3, yn in 1i64..4, d in 2i64..5, c in prop::sample::select(vec![1i64, -1, 2, -3])) {
            let x = SignedMonomial::new(coeff(c), Exponent::new(xn, 2 * d)).unwrap();
            let y = SignedMonomial::new(coeff(1), Exponent::new(yn, 2 * d + 1)).unwrap();
            let lhs = onepsi_corollary_lhs(&x, &y, p(30)).unwrap();
            prop_assert!(lhs.compare(&onepsi_corollary_rhs(&x, &y, p(30)).unwrap()).is_verified());
        }
    }
}
