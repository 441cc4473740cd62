//! Theta functions `j(x;q)` and the usual `J_{a,m}`, `J̄_{a,m}`, `J_m` shorthands.
//!
//! The primary route is the bilateral sum `Σ (-1)^n q^{C(n,2)} x^n`; the
//! triple-product form `(x)_∞ (q/x)_∞ (q)_∞` is kept as an independent
//! cross-check.

use num_traits::{One, Signed};

use crate::error::{QError, Result};
use crate::eulerian::{pochhammer_product, Length, PochhammerSpec};
use crate::series::{binom2, pow_rational, refine, Coefficient, Exponent, QSeries, SignedMonomial, VerificationReport};

/// `j(arg; base)` with monomial argument and base.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ThetaSpec {
    pub arg: SignedMonomial,
    pub base: SignedMonomial,
}

impl ThetaSpec {
    pub fn new(arg: SignedMonomial, base: SignedMonomial) -> Result<Self> {
        if !base.exp().is_positive() {
            return Err(QError::InvalidParams(format!("theta base {base} must have positive q-order")));
        }
        Ok(ThetaSpec { arg, base })
    }

    /// `j(x; q^m)`.
    pub fn with_power_base(arg: SignedMonomial, m: impl Into<Exponent>) -> Result<Self> {
        Self::new(arg, SignedMonomial::q_pow(m))
    }

    /// A theta function vanishes identically exactly when its argument is an
    /// integral power of its base.
    pub fn vanishes(&self) -> bool {
        self.arg.integral_power_of(&self.base).is_some()
    }
}

/// Which of the `J` shorthands to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum JVariant {
    /// `J_{a,m} = j(q^a; q^m)`
    Plain,
    /// `J̄_{a,m} = j(-q^a; q^m)`
    Bar,
    /// `J_m = J_{m,3m} = Π (1 - q^{mn})`; the `a` argument is ignored.
    Eta,
}

/// `j(x; q)` from the bilateral sum, truncated below `precision`.
pub fn theta_j(spec: &ThetaSpec, precision: Exponent) -> Result<QSeries> {
    if !spec.base.exp().is_positive() {
        return Err(QError::InvalidParams("theta base must have positive q-order".into()));
    }
    if spec.vanishes() {
        return Ok(QSeries::zero(precision));
    }
    let b = spec.base.exp();
    let a = spec.arg.exp();
    let exponent = |n: i64| b * binom2(n) + a * n;
    // E(n) is a convex quadratic with vertex at 1/2 - a/b.
    let vertex = Exponent::new(1, 2) - a / b;
    let start = vertex.floor();
    let mut terms = Vec::new();
    let mut push = |n: i64| {
        let sign = if n.rem_euclid(2) == 0 { Coefficient::one() } else { -Coefficient::one() };
        let c = sign * pow_rational(spec.base.coeff(), binom2(n)) * pow_rational(spec.arg.coeff(), n);
        terms.push((exponent(n), c));
    };
    let mut n = start;
    loop {
        let e = exponent(n);
        if e >= precision && Exponent::int(n) > vertex {
            break;
        }
        if e < precision {
            push(n);
        }
        n += 1;
    }
    let mut n = start - 1;
    loop {
        let e = exponent(n);
        if e >= precision && Exponent::int(n) < vertex {
            break;
        }
        if e < precision {
            push(n);
        }
        n -= 1;
    }
    Ok(QSeries::from_terms(terms, precision))
}

/// `j(x_1, ..., x_k; q) = j(x_1;q) ... j(x_k;q)`.
pub fn theta_j_product(specs: &[ThetaSpec], precision: Exponent) -> Result<QSeries> {
    let Some(first) = specs.first() else {
        return Ok(QSeries::one(precision));
    };
    if specs.iter().any(|s| s.base != first.base) {
        return Err(QError::InvalidParams("theta product arguments must share one base".into()));
    }
    if specs.iter().any(ThetaSpec::vanishes) {
        return Ok(QSeries::zero(precision));
    }
    refine(precision, |wp| {
        let mut acc: Option<QSeries> = None;
        for s in specs {
            let t = theta_j(s, wp)?;
            acc = Some(match acc {
                None => t,
                Some(a) => &a * &t,
            });
        }
        Ok(acc.expect("nonempty"))
    })
}

/// `J_{a,m}`, `J̄_{a,m}` or `J_m` truncated below `precision`.
pub fn big_j(a: i64, m: i64, variant: JVariant, precision: Exponent) -> Result<QSeries> {
    if m <= 0 {
        return Err(QError::InvalidParams(format!("J modulus must be positive, got {m}")));
    }
    let spec = match variant {
        JVariant::Plain => ThetaSpec::with_power_base(SignedMonomial::q_pow(a), m)?,
        JVariant::Bar => ThetaSpec::with_power_base(-SignedMonomial::q_pow(a), m)?,
        JVariant::Eta => ThetaSpec::with_power_base(SignedMonomial::q_pow(m), 3 * m)?,
    };
    theta_j(&spec, precision)
}

/// `j(x;q)` computed from the truncated product `(x)_∞ (q/x)_∞ (q)_∞`.
///
/// The product is first expanded with integer coefficients in two formal
/// variables, `X` standing for the argument and `Q` for the base, and only
/// then specialized. This keeps the coefficient arithmetic small; the
/// rational fold is the fallback if an `i128` ever overflows.
pub fn theta_product_form(spec: &ThetaSpec, precision: Exponent) -> Result<QSeries> {
    if spec.vanishes() {
        return Ok(QSeries::zero(precision));
    }
    if !spec.base.exp().is_positive() {
        return Err(QError::InvalidParams("theta base must have positive q-order".into()));
    }
    if let Some(s) = bivariate_product(spec, precision) {
        return Ok(s);
    }
    let base = &spec.base;
    refine(precision, |wp| {
        pochhammer_product(
            &[
                PochhammerSpec::new(spec.arg.clone(), base.clone(), Length::Infinite)?,
                PochhammerSpec::new(base * &spec.arg.recip(), base.clone(), Length::Infinite)?,
                PochhammerSpec::new(base.clone(), base.clone(), Length::Infinite)?,
            ],
            wp,
        )
    })
}

fn bivariate_product(spec: &ThetaSpec, precision: Exponent) -> Option<QSeries> {
    let a = spec.arg.exp();
    let b = spec.base.exp();
    // X^i first appears at Q^{C(i,2)}, so the X-powers that can reach below
    // the horizon are those of the bilateral sum.
    let vertex = Exponent::new(1, 2) - a / b;
    let reaches = |i: i64| b * binom2(i) + a * i < precision;
    let mut needed = Vec::new();
    let mut i = vertex.floor();
    while reaches(i) || Exponent::int(i) <= vertex {
        needed.push(i);
        i += 1;
    }
    let mut i = vertex.floor() - 1;
    while reaches(i) || Exponent::int(i) >= vertex {
        needed.push(i);
        i -= 1;
    }
    // a·i + b·j < precision  <=>  j < (precision - a·i) / b
    let jmax = needed.iter().map(|&i| ((precision - a * i) / b).ceil() - 1).max()?.max(0);
    // every X-power with a nonzero coefficient at some Q^j, j <= jmax
    let (mut lo, mut hi) = (0i64, 0i64);
    while binom2(lo - 1) <= jmax {
        lo -= 1;
    }
    while binom2(hi + 1) <= jmax {
        hi += 1;
    }
    let width = (hi - lo + 1) as usize;
    let rows = jmax as usize + 1;
    if width.checked_mul(rows)? > 50_000_000 {
        return None;
    }
    let mut grid = vec![0i128; width * rows];
    grid[(-lo) as usize] = 1;
    let at = |j: usize, i: i64| j * width + (i - lo) as usize;
    // multiply by (1 - X^s Q^t) in place
    let factor = |grid: &mut Vec<i128>, s: i64, t: usize| -> Option<()> {
        if t == 0 {
            for j in 0..rows {
                for i in ((lo + s)..=hi).rev() {
                    let v = grid[at(j, i)].checked_sub(grid[at(j, i - s)])?;
                    grid[at(j, i)] = v;
                }
            }
            return Some(());
        }
        for j in (t..rows).rev() {
            let (i0, i1) = (lo.max(lo + s), hi.min(hi + s));
            for i in i0..=i1 {
                let v = grid[at(j, i)].checked_sub(grid[at(j - t, i - s)])?;
                grid[at(j, i)] = v;
            }
        }
        Some(())
    };
    for k in 1..rows {
        factor(&mut grid, 0, k)?;
    }
    for k in 0..rows {
        factor(&mut grid, 1, k)?;
    }
    for k in 1..rows {
        factor(&mut grid, -1, k)?;
    }
    let mut terms = Vec::new();
    for j in 0..rows {
        for i in lo..=hi {
            let c = grid[at(j, i)];
            let e = a * i + b * j as i64;
            if c != 0 && e < precision {
                let c = Coefficient::from_integer(c.into())
                    * pow_rational(spec.arg.coeff(), i)
                    * pow_rational(spec.base.coeff(), j as i64);
                terms.push((e, c));
            }
        }
    }
    Some(QSeries::from_terms(terms, precision))
}

/// Jacobi triple product: the sum form against the product form.
pub fn triple_product_check(spec: &ThetaSpec, precision: Exponent) -> Result<VerificationReport> {
    let start = std::time::Instant::now();
    let sum = theta_j(spec, precision)?;
    let product = theta_product_form(spec, precision)?;
    Ok(sum.compare(&product).with_elapsed(start.elapsed()))
}

/// True when the base has a positive coefficient (the product route is only
/// used as a cross-check for these).
pub fn has_positive_base(spec: &ThetaSpec) -> bool {
    spec.base.coeff().is_positive()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::from_int_coeffs;
    use proptest::prelude::*;

    fn m(s: &str) -> SignedMonomial {
        s.parse().unwrap()
    }

    fn p(n: i64) -> Exponent {
        Exponent::int(n)
    }

    /// Direct evaluation of the bilateral sum over a generous index window.
    fn oracle_sum(arg: &SignedMonomial, base: &SignedMonomial, precision: Exponent) -> QSeries {
        let terms = (-60i64..=60).map(|n| {
            let sign = if n % 2 == 0 { 1 } else { -1 };
            let c =
                crate::series::coeff(sign) * pow_rational(base.coeff(), n * (n - 1) / 2) * pow_rational(arg.coeff(), n);
            (base.exp() * (n * (n - 1) / 2) + arg.exp() * n, c)
        });
        QSeries::from_terms(terms, precision)
    }

    #[test]
    fn vanishes_at_base() {
        let s = theta_j(&ThetaSpec::new(m("q"), m("q")).unwrap(), p(20)).unwrap();
        assert!(s.is_empty());
        assert_eq!(s.precision(), p(20));
    }

    #[test]
    fn theta_at_minus_one() {
        let s = theta_j(&ThetaSpec::new(m("-q^0"), m("q")).unwrap(), p(7)).unwrap();
        assert_eq!(s, from_int_coeffs(&[2, 2, 0, 2, 0, 0, 2], 7));
    }

    #[test]
    fn negative_base_matches_direct_sum() {
        let spec = ThetaSpec::new(m("-q"), m("-q^5")).unwrap();
        let s = theta_j(&spec, p(40)).unwrap();
        assert_eq!(s, oracle_sum(&spec.arg, &spec.base, p(40)));
        // n = 0, -1 give 1 and -(-q)^{-1}(-q^5)^{1} = -q^4.
        assert_eq!(s.coeff_at(0), crate::series::coeff(1));
        assert_eq!(s.coeff_at(4), crate::series::coeff(-1));
    }

    #[test]
    fn euler_product_is_pentagonal() {
        // brute force: expand prod_{n<13} (1 - q^n)
        let mut oracle = QSeries::one(13);
        for n in 1..13 {
            oracle = oracle.mul_one_minus(&SignedMonomial::q_pow(n));
        }
        let j1 = big_j(0, 1, JVariant::Eta, p(13)).unwrap();
        assert_eq!(j1, oracle);
        assert_eq!(j1, from_int_coeffs(&[1, -1, -1, 0, 0, 1, 0, 1, 0, 0, 0, 0, -1], 13));
    }

    #[test]
    fn plain_j_with_a_multiple_of_m_is_zero() {
        assert!(big_j(4, 4, JVariant::Plain, p(30)).unwrap().is_empty());
        assert_eq!(big_j(0, 1, JVariant::Bar, p(7)).unwrap(), from_int_coeffs(&[2, 2, 0, 2, 0, 0, 2], 7));
    }

    #[test]
    fn product_of_one_is_theta() {
        let spec = ThetaSpec::new(m("2*q^(1/2)"), m("q^2")).unwrap();
        assert_eq!(theta_j_product(std::slice::from_ref(&spec), p(30)).unwrap(), theta_j(&spec, p(30)).unwrap());
    }

    #[test]
    fn product_with_vanishing_factor() {
        let a = ThetaSpec::new(m("q^3"), m("q^3")).unwrap();
        let b = ThetaSpec::new(m("-q"), m("q^3")).unwrap();
        assert!(theta_j_product(&[a, b], p(30)).unwrap().is_empty());
    }

    #[test]
    fn two_argument_product_matches_separate_factors() {
        let a = ThetaSpec::new(m("q^-2"), m("q^3")).unwrap();
        let b = ThetaSpec::new(m("-1/2*q^(1/3)"), m("q^3")).unwrap();
        let prod = theta_j_product(&[a.clone(), b.clone()], p(40)).unwrap();
        let separate = &theta_j(&a, p(60)).unwrap() * &theta_j(&b, p(60)).unwrap();
        assert!(prod.compare(&separate).is_verified());
        assert_eq!(prod.precision(), p(40));
    }

    #[test]
    fn triple_product_examples() {
        for (x, base) in [("q", "q^3"), ("-q^2", "q^5"), ("q^5", "q^5")] {
            let spec = ThetaSpec::new(m(x), m(base)).unwrap();
            assert!(triple_product_check(&spec, p(50)).unwrap().is_verified(), "{x}; {base}");
        }
    }

    #[test]
    fn integer_expansion_matches_rational_fold() {
        for (x, base) in [("2/3*q^(-7/4)", "3*q^(1/2)"), ("-q^(1/3)", "1/2*q"), ("5*q^4", "q^(3/2)")] {
            let spec = ThetaSpec::new(m(x), m(base)).unwrap();
            let fast = bivariate_product(&spec, p(40)).unwrap();
            let fold = refine(p(40), |wp| {
                pochhammer_product(
                    &[
                        PochhammerSpec::new(spec.arg.clone(), spec.base.clone(), Length::Infinite)?,
                        PochhammerSpec::new(&spec.base * &spec.arg.recip(), spec.base.clone(), Length::Infinite)?,
                        PochhammerSpec::new(spec.base.clone(), spec.base.clone(), Length::Infinite)?,
                    ],
                    wp,
                )
            })
            .unwrap();
            assert_eq!(fast, fold, "{x}; {base}");
        }
    }

    #[test]
    fn vanishing_cases() {
        for k in -2..=3 {
            for mm in 1..=3 {
                let spec = ThetaSpec::with_power_base(SignedMonomial::q_pow(k * mm), mm).unwrap();
                assert!(spec.vanishes());
                assert!(theta_j(&spec, p(25)).unwrap().is_empty());
                // the raw sum cancels as well
                assert!(oracle_sum(&spec.arg, &spec.base, p(25)).is_empty());
            }
        }
    }

    fn arb_spec() -> impl Strategy<Value = ThetaSpec> {
        (-6i64..7, 1i64..4, prop::sample::select(vec![1i64, -1, 2, -3]), 1i64..4, 1i64..3).prop_map(
            |(en, ed, c, b, cd)| {
                let arg = SignedMonomial::new(crate::series::ratio(c, cd), Exponent::new(en, ed)).unwrap();
                ThetaSpec::new(arg, SignedMonomial::q_pow(b)).unwrap()
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(25))]

        #[test]
        fn symmetric_under_inversion(spec in arb_spec()) {
            let flipped = ThetaSpec::new(&spec.base * &spec.arg.recip(), spec.base.clone()).unwrap();
            let a = theta_j(&spec, p(40)).unwrap();
            let b = theta_j(&flipped, p(40)).unwrap();
            prop_assert!(a.compare(&b).is_verified());
        }

        #[test]
        fn quasi_periodic(spec in arb_spec()) {
            let shifted = ThetaSpec::new(&spec.base * &spec.arg, spec.base.clone()).unwrap();
            let lhs = theta_j(&shifted, p(40)).unwrap();
            let rhs = theta_j(&spec, p(60)).unwrap().mul_monomial(&-spec.arg.recip());
            prop_assert!(lhs.compare(&rhs).is_verified());
        }

        #[test]
        fn sum_equals_product(spec in arb_spec()) {
            prop_assert!(triple_product_check(&spec, p(40)).unwrap().is_verified());
        }
    }
}
