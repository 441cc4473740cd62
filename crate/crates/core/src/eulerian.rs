//! q-Pochhammer products, the universal mock theta function `g(x,q)`, and the
//! Eulerian series whose identities are checked by [`catalog_verify`].

use std::time::Instant;

use crate::error::{QError, Result};
use crate::series::{coeff, refine, Exponent, QSeries, SignedMonomial, VerificationReport};
use crate::theta::{big_j, theta_j, JVariant, ThetaSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Length {
    Finite(u64),
    Infinite,
}

/// `(arg; base)_length`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PochhammerSpec {
    pub arg: SignedMonomial,
    pub base: SignedMonomial,
    pub length: Length,
}

impl PochhammerSpec {
    pub fn new(arg: SignedMonomial, base: SignedMonomial, length: Length) -> Result<Self> {
        if !base.exp().is_positive() {
            return Err(QError::InvalidParams(format!("pochhammer base {base} must have positive q-order")));
        }
        Ok(PochhammerSpec { arg, base, length })
    }

    /// `(q^a; q^b)_length`; shorthand for the common integer case.
    pub fn q(a: i64, b: i64, length: Length) -> Result<Self> {
        Self::new(SignedMonomial::q_pow(a), SignedMonomial::q_pow(b), length)
    }

    fn factor(&self, k: u64) -> SignedMonomial {
        &self.arg * &self.base.powi(k as i64)
    }
}

/// The truncated product `Π_{k < length} (1 - arg·base^k)`.
///
/// For infinite length, factors are added until the next one can no longer
/// reach below the horizon: every later factor is `1 + O(q^m)` with `m`
/// increasing, so once `order + m >= precision` the tail is invisible.
pub fn pochhammer(spec: &PochhammerSpec, precision: Exponent) -> Result<QSeries> {
    pochhammer_product(std::slice::from_ref(spec), precision)
}

/// `Π_i (arg_i; base_i)_{length_i}`, folding every factor into a single
/// accumulator so no two dense series are ever multiplied.
pub fn pochhammer_product(specs: &[PochhammerSpec], precision: Exponent) -> Result<QSeries> {
    let negative_shift: Exponent = specs.iter().map(negative_shift).sum();
    let mut acc = QSeries::one(precision + negative_shift);
    for spec in specs {
        let mut k = 0u64;
        loop {
            if let Length::Finite(n) = spec.length {
                if k >= n {
                    break;
                }
            }
            let u = spec.factor(k);
            if u.is_one() {
                return Err(QError::NonUnitFactor(format!("factor (1 - {u}) vanishes")));
            }
            if spec.length == Length::Infinite && u.exp().is_positive() && acc.q_order() + u.exp() >= acc.precision() {
                break;
            }
            acc = acc.mul_one_minus(&u);
            k += 1;
        }
    }
    Ok(acc.truncate(precision))
}

/// Total q-order lost to factors of negative order.
fn negative_shift(spec: &PochhammerSpec) -> Exponent {
    match spec.length {
        Length::Finite(n) => (0..n).map(|k| spec.factor(k).exp()).filter(|e| e.is_negative()).map(|e| -e).sum(),
        Length::Infinite => {
            let mut total = Exponent::ZERO;
            let mut k = 0;
            loop {
                let e = spec.factor(k).exp();
                if !e.is_negative() {
                    break;
                }
                total += -e;
                k += 1;
            }
            total
        }
    }
}

/// `1/(arg; base)_length`, by repeated geometric division.
fn pochhammer_recip(spec: &PochhammerSpec, precision: Exponent) -> Result<QSeries> {
    let Length::Finite(n) = spec.length else {
        return refine(precision, |wp| pochhammer(spec, wp)?.invert());
    };
    let mut acc = QSeries::one(precision);
    for k in 0..n {
        let u = spec.factor(k);
        acc = acc.div_one_minus(&u).map_err(|_| QError::NonUnitFactor(format!("factor (1 - {u}) vanishes")))?;
    }
    Ok(acc)
}

/// Universal mock theta function
/// `g(x,q) = x^{-1} (-1 + Σ_{n≥0} q^{n²} / ((x)_{n+1} (q/x)_n))`, with `q` the
/// given base.
pub fn g_universal(x: &SignedMonomial, base: &SignedMonomial, precision: Exponent) -> Result<QSeries> {
    g_universal_with_extra_terms(x, base, precision, 0)
}

/// `g_universal` summing `extra` terms beyond the cutoff; used to check that
/// the cutoff is safe.
pub fn g_universal_with_extra_terms(
    x: &SignedMonomial,
    base: &SignedMonomial,
    precision: Exponent,
    extra: u64,
) -> Result<QSeries> {
    if !base.exp().is_positive() {
        return Err(QError::InvalidParams("g base must have positive q-order".into()));
    }
    let x_over = base * &x.recip();
    // Every factor 1/(1-u) has order >= 0, so term n has order >= n^2 * b.
    let inner = precision + x.exp().abs() + 1;
    let b = base.exp();
    let mut denom_inv =
        QSeries::one(inner).div_one_minus(x).map_err(|_| QError::NonUnitFactor(format!("(1 - {x}) vanishes")))?;
    let mut sum = &QSeries::constant(coeff(-1), inner) + &denom_inv;
    let mut n: i64 = 1;
    let mut past = 0;
    loop {
        if b * (n * n) > inner {
            if past >= extra {
                break;
            }
            past += 1;
        }
        let u1 = x * &base.powi(n);
        let u2 = &x_over * &base.powi(n - 1);
        denom_inv = denom_inv
            .div_one_minus(&u1)
            .and_then(|s| s.div_one_minus(&u2))
            .map_err(|_| QError::NonUnitFactor(format!("pochhammer factor vanishes at n = {n}")))?;
        let term = denom_inv.mul_monomial(&base.powi(n * n));
        sum = &sum + &term;
        n += 1;
    }
    Ok(sum.mul_monomial(&x.recip()).truncate(precision))
}

/// Names accepted by [`builtin_series`].
pub const BUILTIN_NAMES: [&str; 6] =
    ["f0_lhs", "slater39_lhs", "andrews114_lhs", "andrews114_rhs", "andrews425_lhs", "andrews425_rhs"];

/// One of the named Eulerian series or Hecke-type expansions.
pub fn builtin_series(name: &str, precision: Exponent) -> Result<QSeries> {
    match name {
        "f0_lhs" => eulerian_sum(
            precision,
            |n| n * n,
            |n| {
                vec![PochhammerSpec::new(-SignedMonomial::q_pow(1), SignedMonomial::q_pow(1), Length::Finite(n as u64))]
            },
        ),
        "slater39_lhs" => {
            eulerian_sum(precision, |n| 2 * n * n, |n| vec![PochhammerSpec::q(1, 1, Length::Finite(2 * n as u64))])
        }
        "andrews114_lhs" => eulerian_sum(
            precision,
            |n| 2 * n * n,
            |n| {
                vec![PochhammerSpec::new(
                    -SignedMonomial::q_pow(1),
                    SignedMonomial::q_pow(1),
                    Length::Finite(2 * n as u64),
                )]
            },
        ),
        "andrews425_lhs" => eulerian_sum(
            precision,
            |n| 3 * n * n + 2 * n,
            |n| {
                vec![
                    PochhammerSpec::q(1, 1, Length::Finite(2 * n as u64)),
                    PochhammerSpec::new(-SignedMonomial::q_pow(2), SignedMonomial::q_pow(2), Length::Finite(n as u64)),
                ]
            },
        ),
        "andrews114_rhs" => hecke_form(precision, |n| 4 * n * n + n, |n| 6 * n + 3, |j| (-j * j, j.rem_euclid(2) == 1)),
        "andrews425_rhs" => hecke_form(
            precision,
            |n| 4 * n * n + 2 * n,
            |n| 4 * n + 2,
            |j| {
                // (-1)^j (-q)^m with m = -j(3j-1)/2
                let m = -j * (3 * j - 1) / 2;
                (m, (j + m).rem_euclid(2) == 1)
            },
        ),
        other => Err(QError::UnknownBuiltin(other.to_string())),
    }
}

/// `Σ_{n≥0} q^{num(n)} / Π denominators(n)` for an increasing numerator exponent.
fn eulerian_sum(
    precision: Exponent,
    num: impl Fn(i64) -> i64,
    denominators: impl Fn(i64) -> Vec<Result<PochhammerSpec>>,
) -> Result<QSeries> {
    let mut sum = QSeries::zero(precision);
    let mut n = 0;
    while Exponent::int(num(n)) < precision {
        let mut term = QSeries::monomial(&SignedMonomial::q_pow(num(n)), precision);
        for spec in denominators(n) {
            term = &term * &pochhammer_recip(&spec?, precision)?;
        }
        sum = &sum + &term;
        n += 1;
    }
    Ok(sum)
}

/// `(1/(q²;q²)_∞) Σ_{n≥0} q^{lead(n)} (1 - q^{gap(n)}) Σ_{|j|≤n} ±q^{e(j)}`,
/// where `inner(j)` gives the exponent and whether the sign is negative.
fn hecke_form(
    precision: Exponent,
    lead: impl Fn(i64) -> i64,
    gap: impl Fn(i64) -> i64,
    inner: impl Fn(i64) -> (i64, bool),
) -> Result<QSeries> {
    let mut terms = Vec::new();
    let mut n = 0i64;
    loop {
        let min_inner = (-n..=n).map(|j| inner(j).0).min().unwrap_or(0);
        if Exponent::int(lead(n) + min_inner) >= precision {
            break;
        }
        for j in -n..=n {
            let (e, negative) = inner(j);
            let c = if negative { -1 } else { 1 };
            terms.push((Exponent::int(lead(n) + e), coeff(c)));
            terms.push((Exponent::int(lead(n) + gap(n) + e), coeff(-c)));
        }
        n += 1;
    }
    let sum = QSeries::from_terms(terms, precision);
    let prefactor = pochhammer_recip(&PochhammerSpec::q(2, 2, Length::Infinite)?, precision)?;
    Ok(&sum * &prefactor)
}

/// A named identity from the catalog: both sides as series builders.
#[derive(Clone, Copy)]
pub struct IdentityCatalogEntry {
    pub name: &'static str,
    pub source: &'static str,
    pub lhs: fn(Exponent) -> Result<QSeries>,
    pub rhs: fn(Exponent) -> Result<QSeries>,
}

impl std::fmt::Debug for IdentityCatalogEntry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("IdentityCatalogEntry").field("name", &self.name).field("source", &self.source).finish()
    }
}

fn q(e: i64) -> SignedMonomial {
    SignedMonomial::q_pow(e)
}

fn jp(a: i64, m: i64, p: Exponent) -> Result<QSeries> {
    big_j(a, m, JVariant::Plain, p)
}

fn jb(a: i64, m: i64, p: Exponent) -> Result<QSeries> {
    big_j(a, m, JVariant::Bar, p)
}

fn jm(m: i64, p: Exponent) -> Result<QSeries> {
    big_j(0, m, JVariant::Eta, p)
}

fn f0_conjecture_rhs(p: Exponent) -> Result<QSeries> {
    refine(p, |wp| {
        let theta = (&jp(5, 10, wp)? * &jp(2, 5, wp)?).div(&jm(1, wp)?)?;
        let g = g_universal(&q(2), &q(10), wp)?.mul_monomial(&SignedMonomial::from_int(-2, 2));
        Ok(&theta + &g)
    })
}

fn slater_rhs(p: Exponent) -> Result<QSeries> {
    refine(p, |wp| jb(3, 8, wp)?.div(&jm(2, wp)?))
}

fn g_neg_q_rhs(p: Exponent) -> Result<QSeries> {
    refine(p, |wp| {
        let g = g_universal(&-q(1), &q(8), wp)?.mul_monomial(&SignedMonomial::from_int(-2, 1));
        let theta = (&jp(1, 2, wp)? * &jb(3, 8, wp)?).div(&jm(2, wp)?)?;
        Ok(&(&QSeries::constant(coeff(2), wp) + &g) - &theta)
    })
}

fn eq_1_5_rhs(p: Exponent) -> Result<QSeries> {
    refine(p, |wp| {
        let neg_q5 = -q(5);
        let j2 = jm(2, wp)?;
        let first = (&g_universal(&q(2), &q(10), wp)? * &theta_j(&ThetaSpec::new(-q(1), neg_q5.clone())?, wp)?)
            .div(&j2)?
            .mul_monomial(&SignedMonomial::from_int(-1, 2));
        let second = (&g_universal(&q(4), &q(10), wp)? * &theta_j(&ThetaSpec::new(q(2), neg_q5)?, wp)?)
            .div(&j2)?
            .mul_monomial(&q(3));
        let cube = theta_j(&ThetaSpec::new(-q(5), -q(15))?, wp)?.powi(3)?;
        let third = cube.div(&(&j2 * &jm(10, wp)?))?;
        Ok(&(&first + &second) + &third)
    })
}

fn builtin_fn(name: &'static str) -> impl Fn(Exponent) -> Result<QSeries> {
    move |p| builtin_series(name, p)
}

/// The catalog of named identities, in stable order.
pub fn catalog() -> Vec<IdentityCatalogEntry> {
    vec![
        IdentityCatalogEntry {
            name: "f0_conjecture",
            source: "fifth-order mock theta conjecture for f0",
            lhs: |p| builtin_fn("f0_lhs")(p),
            rhs: f0_conjecture_rhs,
        },
        IdentityCatalogEntry {
            name: "slater_39",
            source: "Rogers-Ramanujan type identity from Slater's list",
            lhs: |p| builtin_fn("slater39_lhs")(p),
            rhs: slater_rhs,
        },
        IdentityCatalogEntry {
            name: "andrews_1_14",
            source: "Andrews' Hecke-type expansion of the q^{2n^2}/(-q;q)_{2n} series",
            lhs: |p| builtin_fn("andrews114_lhs")(p),
            rhs: |p| builtin_fn("andrews114_rhs")(p),
        },
        IdentityCatalogEntry {
            name: "mortenson_g_neg_q",
            source: "universal mock theta form of the q^{2n^2}/(-q;q)_{2n} series",
            lhs: |p| builtin_fn("andrews114_lhs")(p),
            rhs: g_neg_q_rhs,
        },
        IdentityCatalogEntry {
            name: "andrews_4_25",
            source: "Andrews' Hecke-type expansion of the q^{3n^2+2n} series",
            lhs: |p| builtin_fn("andrews425_lhs")(p),
            rhs: |p| builtin_fn("andrews425_rhs")(p),
        },
        IdentityCatalogEntry {
            name: "eq_1_5",
            source: "Appell-Lerch form of the q^{3n^2+2n} series",
            lhs: |p| builtin_fn("andrews425_lhs")(p),
            rhs: eq_1_5_rhs,
        },
    ]
}

pub fn catalog_entry(name: &str) -> Result<IdentityCatalogEntry> {
    catalog().into_iter().find(|e| e.name == name).ok_or_else(|| QError::UnknownBuiltin(name.to_string()))
}

/// Builds both sides of a catalog identity and compares them.
pub fn catalog_verify(name: &str, precision: Exponent) -> Result<VerificationReport> {
    let entry = catalog_entry(name)?;
    let start = Instant::now();
    let lhs = (entry.lhs)(precision)?;
    let rhs = (entry.rhs)(precision)?;
    Ok(lhs.compare_to(&rhs, precision).with_elapsed(start.elapsed()))
}
