//! Appell-Lerch sums
//! `m(x,q,z) = (1/j(z;q)) Σ_r (-1)^r q^{C(r,2)} z^r / (1 - q^{r-1} x z)`
//! under monomial specialization, and the two double-sum expansions of
//! `J̄_{0,1} m(x,q,-1)`.

use num_traits::One;

use crate::error::{QError, Result};
use crate::hecke::sg2;
use crate::series::{binom2, pow_rational, refine, Coefficient, Exponent, QSeries, SignedMonomial};
use crate::theta::{theta_j, ThetaSpec};

/// The parameters of `m(x, base, z)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AppellSpec {
    pub x: SignedMonomial,
    pub base: SignedMonomial,
    pub z: SignedMonomial,
}

impl AppellSpec {
    /// Checks that neither `z` nor `xz` is an integral power of the base.
    pub fn new(x: SignedMonomial, base: SignedMonomial, z: SignedMonomial) -> Result<Self> {
        if !base.exp().is_positive() {
            return Err(QError::InvalidParams(format!("Appell-Lerch base {base} must have positive q-order")));
        }
        if let Some(k) = z.integral_power_of(&base) {
            return Err(QError::PoleAtSpecialization(format!("z = {z} is the {k}-th power of the base")));
        }
        let xz = &x * &z;
        if let Some(k) = xz.integral_power_of(&base) {
            return Err(QError::PoleAtSpecialization(format!("xz = {xz} is the {k}-th power of the base")));
        }
        Ok(AppellSpec { x, base, z })
    }

    /// `m(x, q, -1)`, the only `z` the applications need.
    pub fn at_minus_one(x: SignedMonomial, base: SignedMonomial) -> Result<Self> {
        Self::new(x, base, SignedMonomial::from_int(-1, 0))
    }
}

/// `m(x, base, z)` modulo `q^precision`.
pub fn appell_m(spec: &AppellSpec, precision: Exponent) -> Result<QSeries> {
    let theta = ThetaSpec::new(spec.z.clone(), spec.base.clone())?;
    refine(precision, |wp| {
        let numerator = appell_numerator(spec, wp)?;
        numerator.div(&theta_j(&theta, wp)?)
    })
}

/// `Σ_r (-1)^r B^{C(r,2)} z^r / (1 - u_r)` with `u_r = B^{r-1} x z`.
fn appell_numerator(spec: &AppellSpec, precision: Exponent) -> Result<QSeries> {
    let b = spec.base.exp();
    let xz = &spec.x * &spec.z;
    // Each expanded 1/(1 - u) has order >= 0, so the term for r has order at
    // least ord(T_r) = C(r,2) b + r ord(z), a convex quadratic in r. Scanning
    // outward from its vertex, the first r with ord(T_r) >= precision bounds
    // every later r in that direction.
    let vertex = (Exponent::new(1, 2) - spec.z.exp() / b).floor();
    let t_order = |r: i64| b * binom2(r) + spec.z.exp() * r;
    let mut terms: Vec<(Exponent, Coefficient)> = Vec::new();
    for dir in [1i64, -1] {
        let mut r = if dir == 1 { vertex + 1 } else { vertex };
        while t_order(r) < precision {
            let sign = if r.rem_euclid(2) == 0 { 1 } else { -1 };
            let t = (&spec.base.powi(binom2(r)) * &spec.z.powi(r)).scale(&Coefficient::from_integer(sign.into()))?;
            let u = &xz * &spec.base.powi(r - 1);
            expand_geometric(&t, &u, precision, &mut terms)?;
            r += dir;
        }
    }
    Ok(QSeries::from_terms(terms, precision))
}

/// Pushes the terms of `t / (1 - u)` below `precision`.
fn expand_geometric(
    t: &SignedMonomial,
    u: &SignedMonomial,
    precision: Exponent,
    out: &mut Vec<(Exponent, Coefficient)>,
) -> Result<()> {
    let e = u.exp();
    if e.is_zero() {
        let c = u.coeff();
        if c.is_one() {
            return Err(QError::PoleAtSpecialization(format!("denominator 1 - {u} vanishes")));
        }
        out.push((t.exp(), t.coeff() / (Coefficient::one() - c)));
    } else if e.is_positive() {
        let mut k = 0;
        while t.exp() + e * k < precision {
            out.push((t.exp() + e * k, t.coeff() * pow_rational(u.coeff(), k)));
            k += 1;
        }
    } else {
        // 1/(1-u) = -Σ_{k≥1} u^{-k}
        let mut k = 1;
        while t.exp() - e * k < precision {
            out.push((t.exp() - e * k, -(t.coeff() * pow_rational(u.coeff(), -k))));
            k += 1;
        }
    }
    Ok(())
}

/// Double sum over the same-sign quadrants of `(v, s)`, weight `sg(v,s)`,
/// with q-exponent `quad(v, s) + s·ord(x)` and coefficient `(-c)^s`.
///
/// `row_min(v)` must bound the exponent from below on row `v` and be
/// increasing in `|v|` on each quadrant; the exponent must be increasing in
/// `|s|` on each row.
fn quadrant_sum(
    x: &SignedMonomial,
    precision: Exponent,
    quad: impl Fn(i64, i64) -> i64,
    row_min: impl Fn(i64) -> Exponent,
) -> QSeries {
    let e = x.exp();
    let neg_c = -x.coeff().clone();
    let mut terms = Vec::new();
    for (v0, dir) in [(0i64, 1i64), (-1, -1)] {
        let mut v = v0;
        while row_min(v) < precision {
            let mut s = v0;
            loop {
                let exp = Exponent::int(quad(v, s)) + e * s;
                if exp >= precision {
                    break;
                }
                let c = pow_rational(&neg_c, s) * Coefficient::from_integer(sg2(v, s).into());
                terms.push((exp, c));
                s += dir;
            }
            v += dir;
        }
    }
    QSeries::from_terms(terms, precision)
}

/// `Σ_{v,s} sg(v,s) q^{C(v+1,2)+vs} (-x)^s` for `0 < ord(x) < 1`; equal to
/// `J̄_{0,1} m(x,q,-1)`.
pub fn lemma_expansion_a(x: &SignedMonomial, precision: Exponent) -> Result<QSeries> {
    let e = x.exp();
    if !(e.is_positive() && e < Exponent::ONE) {
        return Err(QError::WindowViolation(format!("need 0 < ord(x) < 1, got {e}")));
    }
    // v >= 0: minimum at s = 0 is C(v+1,2).
    // v = -a < 0: minimum at s = -1 is C(a,2) + a - ord(x).
    let row_min = |v: i64| {
        if v >= 0 {
            Exponent::int(binom2(v + 1))
        } else {
            Exponent::int(binom2(-v) - v) - e
        }
    };
    Ok(quadrant_sum(x, precision, |v, s| binom2(v + 1) + v * s, row_min))
}

/// `Σ_{v,s} sg(v,s) q^{C(v+1,2)+(v+1)(s+1)} (-x)^s` for `-1 < ord(x) < 0`;
/// equal to `J̄_{0,1} m(x,q,-1)`.
pub fn lemma_expansion_b(x: &SignedMonomial, precision: Exponent) -> Result<QSeries> {
    let e = x.exp();
    if !(e.is_negative() && e > -Exponent::ONE) {
        return Err(QError::WindowViolation(format!("need -1 < ord(x) < 0, got {e}")));
    }
    // v >= 0: minimum at s = 0 is C(v+1,2) + v + 1.
    // v = -a < 0: minimum at s = -1 is C(a,2) - ord(x).
    let row_min = |v: i64| {
        if v >= 0 {
            Exponent::int(binom2(v + 1) + v + 1)
        } else {
            Exponent::int(binom2(-v)) - e
        }
    };
    Ok(quadrant_sum(x, precision, |v, s| binom2(v + 1) + (v + 1) * (s + 1), row_min))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::coeff;
    use crate::theta::{big_j, JVariant};
    use proptest::prelude::*;

    fn p(n: i64) -> Exponent {
        Exponent::int(n)
    }

    fn mono(s: &str) -> SignedMonomial {
        s.parse().unwrap()
    }

    fn jbar01_m(x: &SignedMonomial, prec: i64) -> QSeries {
        let m = appell_m(&AppellSpec::at_minus_one(x.clone(), mono("q")).unwrap(), p(prec)).unwrap();
        &big_j(0, 1, JVariant::Bar, p(prec)).unwrap() * &m
    }

    /// Brute-force box sum, no row logic.
    fn box_oracle(x: &SignedMonomial, quad: impl Fn(i64, i64) -> i64, prec: i64) -> QSeries {
        let mut terms = Vec::new();
        for v in -120i64..120 {
            for s in -120i64..120 {
                let w = sg2(v, s);
                if w != 0 {
                    let exp = Exponent::int(quad(v, s)) + x.exp() * s;
                    terms.push((exp, pow_rational(&-x.coeff().clone(), s) * coeff(w)));
                }
            }
        }
        QSeries::from_terms(terms, p(prec))
    }

    #[test]
    fn poles_are_refused() {
        let q = mono("q");
        assert!(matches!(AppellSpec::new(mono("-q^1"), q.clone(), mono("-q^1")), Err(QError::PoleAtSpecialization(_))));
        assert!(matches!(AppellSpec::new(mono("q^3"), q.clone(), mono("q^-1")), Err(QError::PoleAtSpecialization(_))));
        assert!(matches!(AppellSpec::new(mono("q^1"), q, mono("q^2")), Err(QError::PoleAtSpecialization(_))));
    }

    #[test]
    fn expansion_a_matches_appell() {
        let x = mono("q^(1/2)");
        let lhs = lemma_expansion_a(&x, p(20)).unwrap();
        assert!(lhs.compare(&jbar01_m(&x, 20)).is_verified());
        assert_eq!(lhs.coeff(Exponent::ZERO), coeff(1));
        assert_eq!(lhs.substitute_q_power(2).precision(), p(40));
    }

    #[test]
    fn expansion_b_matches_appell() {
        let x = mono("q^(-1/2)");
        let lhs = lemma_expansion_b(&x, p(20)).unwrap();
        assert!(lhs.compare(&jbar01_m(&x, 20)).is_verified());
    }

    #[test]
    fn expansions_match_box_oracle() {
        let x = mono("-2*q^(1/3)");
        let a = lemma_expansion_a(&x, p(25)).unwrap();
        assert_eq!(a, box_oracle(&x, |v, s| binom2(v + 1) + v * s, 25));
        let y = mono("3*q^(-2/5)");
        let b = lemma_expansion_b(&y, p(25)).unwrap();
        assert_eq!(b, box_oracle(&y, |v, s| binom2(v + 1) + (v + 1) * (s + 1), 25));
    }

    #[test]
    fn windows_partition() {
        assert!(matches!(lemma_expansion_a(&mono("q^(3/2)"), p(10)), Err(QError::WindowViolation(_))));
        assert!(matches!(lemma_expansion_b(&mono("q^(1/2)"), p(10)), Err(QError::WindowViolation(_))));
        for x in [mono("q^(3/2)"), mono("q^0"), mono("q^-1"), mono("q^(-3/2)")] {
            assert!(lemma_expansion_a(&x, p(10)).is_err());
            assert!(lemma_expansion_b(&x, p(10)).is_err());
        }
    }

    #[test]
    fn unit_denominator_gives_one_half() {
        // x = q, z = -1: u_0 = q^{-1}·q·(-1) = -1, contributing t/2.
        let spec = AppellSpec::at_minus_one(mono("q"), mono("q")).unwrap();
        let num = appell_numerator(&spec, p(4)).unwrap();
        assert!(!num.is_integral());
        assert!(appell_m(&spec, p(10)).is_ok());
    }

    #[test]
    fn general_z_against_direct_definition() {
        // m(x,q,z) j(z;q) = Σ_r (-1)^r q^{C(r,2)} z^r / (1 - q^{r-1} x z), each
        // term divided as a series.
        let spec = AppellSpec::new(mono("2*q^(1/3)"), mono("q"), mono("q^(1/2)")).unwrap();
        let m = appell_m(&spec, p(15)).unwrap();
        let j = theta_j(&ThetaSpec::new(spec.z.clone(), spec.base.clone()).unwrap(), p(15)).unwrap();
        let mut direct = QSeries::zero(p(15));
        for r in -8i64..8 {
            let t = SignedMonomial::new(coeff(if r % 2 == 0 { 1 } else { -1 }), Exponent::ZERO).unwrap();
            let t = &(&t * &spec.base.powi(binom2(r))) * &spec.z.powi(r);
            let u = &(&spec.x * &spec.z) * &spec.base.powi(r - 1);
            let den = QSeries::one(p(40)).mul_one_minus(&u);
            let term = QSeries::monomial(&t, p(40)).div(&den).unwrap();
            direct = &direct + &term.truncate(p(15));
        }
        assert!((&m * &j).compare(&direct).is_verified());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn both_windows_agree_with_appell(n in 1i64..7, d in 2i64..8, c in prop::sample::select(vec![1i64, -1, 2, -3])) {
            prop_assume!(n < d);
            let xa = SignedMonomial::new(coeff(c), Exponent::new(n, d)).unwrap();
            let xb = SignedMonomial::new(coeff(c), Exponent::new(-n, d)).unwrap();
            prop_assert!(lemma_expansion_a(&xa, p(15)).unwrap().compare(&jbar01_m(&xa, 15)).is_verified());
            prop_assert!(lemma_expansion_b(&xb, p(15)).unwrap().compare(&jbar01_m(&xb, 15)).is_verified());
        }

        #[test]
        fn rescaling_is_substitution(e in -4i64..5, m in 2u32..4) {
            prop_assume!(e != 0);
            let x = SignedMonomial::new(coeff(3), Exponent::new(e, 3)).unwrap();
            let small = appell_m(&AppellSpec::at_minus_one(x.clone(), mono("q")).unwrap(), p(12)).unwrap();
            let xm = SignedMonomial::new(coeff(3), x.exp() * m as i64).unwrap();
            let big = appell_m(&AppellSpec::at_minus_one(xm, SignedMonomial::q_pow(m as i64)).unwrap(), p(12 * m as i64)).unwrap();
            prop_assert_eq!(small.substitute_q_power(m), big);
        }
    }
}
