use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::exponent::{common_denominator, Exponent};
use super::monomial::{parse_rational, SignedMonomial};
use super::report::{Mismatch, VerificationReport, VerificationStatus};
use super::Coefficient;
use crate::error::{QError, Result};

/// Dense accumulators above this many slots fall back to ordered-map accumulation.
const DENSE_LIMIT: i64 = 1 << 22;

/// A Laurent series in q with rational exponents, known exactly modulo
/// `q^precision`.
///
/// Invariants: no stored zero coefficient, every stored exponent is strictly
/// below `precision`. An empty series is *not* known to be zero; it only has no
/// visible terms below its horizon.
#[derive(Clone, PartialEq, Eq)]
pub struct QSeries {
    terms: BTreeMap<Exponent, Coefficient>,
    precision: Exponent,
}

impl QSeries {
    pub fn zero(precision: impl Into<Exponent>) -> Self {
        QSeries { terms: BTreeMap::new(), precision: precision.into() }
    }

    pub fn one(precision: impl Into<Exponent>) -> Self {
        Self::constant(Coefficient::one(), precision)
    }

    pub fn constant(c: Coefficient, precision: impl Into<Exponent>) -> Self {
        Self::from_terms([(Exponent::ZERO, c)], precision)
    }

    pub fn monomial(m: &SignedMonomial, precision: impl Into<Exponent>) -> Self {
        Self::from_terms([(m.exp(), m.coeff().clone())], precision)
    }

    /// Builds a series, summing repeated exponents and dropping zero or
    /// beyond-horizon terms.
    pub fn from_terms(
        terms: impl IntoIterator<Item = (Exponent, Coefficient)>,
        precision: impl Into<Exponent>,
    ) -> Self {
        let precision = precision.into();
        let mut map: BTreeMap<Exponent, Coefficient> = BTreeMap::new();
        for (e, c) in terms {
            if e < precision {
                *map.entry(e).or_insert_with(Coefficient::zero) += c;
            }
        }
        map.retain(|_, c| !c.is_zero());
        QSeries { terms: map, precision }
    }

    pub(crate) fn from_map(mut terms: BTreeMap<Exponent, Coefficient>, precision: Exponent) -> Self {
        terms.retain(|e, c| *e < precision && !c.is_zero());
        QSeries { terms, precision }
    }

    pub fn precision(&self) -> Exponent {
        self.precision
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Exponent, &Coefficient)> + '_ {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// True when no term is visible below the horizon.
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: Exponent) -> Coefficient {
        self.terms.get(&e).cloned().unwrap_or_else(Coefficient::zero)
    }

    /// Coefficient of `q^n` for integer `n`.
    pub fn coeff_at(&self, n: i64) -> Coefficient {
        self.coeff(Exponent::int(n))
    }

    /// Least stored exponent, or the horizon when nothing is visible.
    pub fn q_order(&self) -> Exponent {
        self.terms.keys().next().copied().unwrap_or(self.precision)
    }

    pub fn leading_term(&self) -> Option<(Exponent, &Coefficient)> {
        self.terms.iter().next().map(|(e, c)| (*e, c))
    }

    pub fn truncate(&self, precision: Exponent) -> QSeries {
        let precision = precision.min(self.precision);
        let terms = self.terms.range(..precision).map(|(e, c)| (*e, c.clone())).collect();
        QSeries { terms, precision }
    }

    /// True when every coefficient is an integer.
    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    pub fn scale(&self, c: &Coefficient) -> QSeries {
        if c.is_zero() {
            return QSeries::zero(self.precision);
        }
        let terms = self.terms.iter().map(|(e, v)| (*e, v * c)).collect();
        QSeries { terms, precision: self.precision }
    }

    /// Exact multiplication by a monomial: exponents and horizon both shift.
    pub fn mul_monomial(&self, m: &SignedMonomial) -> QSeries {
        let shift = m.exp();
        let terms = self.terms.iter().map(|(e, v)| (*e + shift, v * m.coeff())).collect();
        QSeries { terms, precision: self.precision + shift }
    }

    /// `self * (1 - u)`; exact, so the horizon only moves when `u` has negative order.
    pub fn mul_one_minus(&self, u: &SignedMonomial) -> QSeries {
        let shifted = self.mul_monomial(u);
        self.sub_series(&shifted)
    }

    /// `self / (1 - u)` by geometric expansion in whichever direction converges.
    pub fn div_one_minus(&self, u: &SignedMonomial) -> Result<QSeries> {
        let ue = u.exp();
        if ue.is_zero() {
            let denom = Coefficient::one() - u.coeff();
            if denom.is_zero() {
                return Err(QError::NonUnitFactor("division by 1 - 1".into()));
            }
            return Ok(self.scale(&denom.recip()));
        }
        if ue.is_negative() {
            // 1/(1-u) = -u^{-1} / (1 - u^{-1})
            let inv = u.recip();
            return self.mul_monomial(&-&inv).div_one_minus(&inv);
        }
        let mut acc: BTreeMap<Exponent, Coefficient> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut exp = *e;
            let mut coeff = c.clone();
            while exp < self.precision {
                *acc.entry(exp).or_insert_with(Coefficient::zero) += &coeff;
                exp += ue;
                coeff *= u.coeff();
            }
        }
        Ok(QSeries::from_map(acc, self.precision))
    }

    fn add_series(&self, other: &QSeries) -> QSeries {
        let precision = self.precision.min(other.precision);
        let mut terms = self.terms.range(..precision).map(|(e, c)| (*e, c.clone())).collect::<BTreeMap<_, _>>();
        for (e, c) in other.terms.range(..precision) {
            let entry = terms.entry(*e).or_insert_with(Coefficient::zero);
            *entry += c;
        }
        terms.retain(|_, c| !c.is_zero());
        QSeries { terms, precision }
    }

    fn sub_series(&self, other: &QSeries) -> QSeries {
        self.add_series(&other.neg_series())
    }

    fn neg_series(&self) -> QSeries {
        let terms = self.terms.iter().map(|(e, c)| (*e, -c)).collect();
        QSeries { terms, precision: self.precision }
    }

    fn mul_series(&self, other: &QSeries) -> QSeries {
        let (oa, ob) = (self.q_order(), other.q_order());
        let precision = (self.precision + ob).min(other.precision + oa);
        if self.is_empty() || other.is_empty() {
            return QSeries::zero(precision);
        }
        let d = common_denominator(self.terms.keys().chain(other.terms.keys()));
        let span = (precision - oa - ob) * d;
        if span.ceil() <= 0 {
            return QSeries::zero(precision);
        }
        let len = span.ceil();
        if len > DENSE_LIMIT {
            return self.mul_sparse(other, precision);
        }
        let (a_int, la) = integer_scaled(self, oa, d);
        let (b_int, lb) = integer_scaled(other, ob, d);
        let mut acc = vec![BigInt::zero(); len as usize];
        for (i, ca) in &a_int {
            for (j, cb) in &b_int {
                let k = i + j;
                if k >= len {
                    break;
                }
                acc[k as usize] += ca * cb;
            }
        }
        let scale = la * lb;
        let base = oa + ob;
        let terms = acc
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (base + Exponent::new(k as i64, d), Coefficient::new(c, scale.clone())))
            .collect();
        QSeries::from_map(terms, precision)
    }

    fn mul_sparse(&self, other: &QSeries, precision: Exponent) -> QSeries {
        let mut acc: BTreeMap<Exponent, Coefficient> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = *ea + *eb;
                if e >= precision {
                    break;
                }
                *acc.entry(e).or_insert_with(Coefficient::zero) += ca * cb;
            }
        }
        QSeries::from_map(acc, precision)
    }

    /// Multiplicative inverse: the leading monomial is factored out and the
    /// unit part is inverted by the usual triangular recurrence.
    pub fn invert(&self) -> Result<QSeries> {
        let (e0, c0) = match self.leading_term() {
            Some((e, c)) => (e, c.clone()),
            None => return Err(QError::InsufficientPrecision),
        };
        let rel = self.precision - e0;
        let d = common_denominator(self.terms.keys().chain(std::iter::once(&e0)));
        let len = (rel * d).ceil();
        if len > DENSE_LIMIT {
            return Err(QError::InvalidParams("series too wide to invert".into()));
        }
        let len = len as usize;
        // w = self / (c0 q^e0), scaled to integers W = L * w.
        let wl = self.terms.values().fold(BigInt::one(), |acc, c| acc.lcm(&(c / &c0).denom().clone()));
        let mut w: Vec<(usize, BigInt)> = Vec::new();
        for (e, c) in &self.terms {
            let k = ((*e - e0) * d).numer() as usize;
            if k == 0 {
                continue;
            }
            let scaled = (c / &c0) * Coefficient::from_integer(wl.clone());
            w.push((k, scaled.to_integer()));
        }
        let mut lpow = vec![BigInt::one()];
        for _ in 1..len.max(1) {
            let next = lpow.last().unwrap() * &wl;
            lpow.push(next);
        }
        // v[k] = V[k] / L^k with V[k] = -sum_j W[j] V[k-j] L^{j-1}.
        let mut v = vec![BigInt::zero(); len];
        if len > 0 {
            v[0] = BigInt::one();
        }
        for k in 1..len {
            let mut s = BigInt::zero();
            for (j, wj) in &w {
                if *j > k {
                    break;
                }
                let prev = &v[k - j];
                if prev.is_zero() {
                    continue;
                }
                s += wj * prev * &lpow[j - 1];
            }
            v[k] = -s;
        }
        let c0_inv = c0.recip();
        let terms = v
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| {
                let coeff = Coefficient::new(c, lpow[k].clone()) * &c0_inv;
                (Exponent::new(k as i64, d) - e0, coeff)
            })
            .collect();
        Ok(QSeries::from_map(terms, rel - e0))
    }

    /// Exact quotient by long division. The cost is `len * nnz(other)`, so
    /// dividing by a sparse series (a theta function, a finite product) never
    /// forms a dense inverse.
    pub fn div(&self, other: &QSeries) -> Result<QSeries> {
        let (e0, c0) = match other.leading_term() {
            Some((e, c)) => (e, c.clone()),
            None => return Err(QError::InsufficientPrecision),
        };
        let oa = self.q_order();
        let precision = (self.precision - e0).min(other.precision - e0 - e0 + oa);
        let shift = oa - e0;
        let rel = precision - shift;
        if self.is_empty() || !rel.is_positive() {
            return Ok(QSeries::zero(precision));
        }
        let d = common_denominator(self.terms.keys().chain(other.terms.keys()).chain([&e0, &oa]));
        let len = (rel * d).ceil();
        if len > DENSE_LIMIT {
            return Ok(self * &other.invert()?);
        }
        let len = len as usize;
        let index = |e: Exponent, origin: Exponent| ((e - origin) * d).numer() as usize;
        // divisor normalized to 1 + w, w scaled to integers W = L w
        let wl = other.terms.values().fold(BigInt::one(), |acc, c| acc.lcm((c / &c0).denom()));
        let mut lpow = vec![BigInt::one()];
        for _ in 1..len {
            let next = lpow.last().unwrap() * &wl;
            lpow.push(next);
        }
        // W_j L^{j-1}, enough to run V_k = L^k U_k - sum_j W_j L^{j-1} V_{k-j}
        let w: Vec<(usize, BigInt)> = other
            .terms
            .iter()
            .map(|(e, c)| (index(*e, e0), c))
            .filter(|(k, _)| *k > 0 && *k < len)
            .map(|(k, c)| (k, ((c / &c0) * Coefficient::from_integer(wl.clone())).to_integer() * &lpow[k - 1]))
            .collect();
        // dividend scaled to integers U = A a
        let al = self.terms.values().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let mut u = vec![BigInt::zero(); len];
        for (e, c) in self.terms.range(..oa + rel) {
            u[index(*e, oa)] = (c * Coefficient::from_integer(al.clone())).to_integer();
        }
        let mut v = vec![BigInt::zero(); len];
        for k in 0..len {
            let mut s = &u[k] * &lpow[k];
            for (j, wj) in &w {
                if *j > k {
                    break;
                }
                let prev = &v[k - j];
                if !prev.is_zero() {
                    s -= wj * prev;
                }
            }
            v[k] = s;
        }
        let c0_inv = c0.recip();
        let terms = v
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| {
                let coeff = Coefficient::new(c, &lpow[k] * &al) * &c0_inv;
                (shift + Exponent::new(k as i64, d), coeff)
            })
            .collect();
        Ok(QSeries::from_map(terms, precision))
    }

    /// Integer power; negative powers go through [`QSeries::invert`].
    pub fn powi(&self, k: i64) -> Result<QSeries> {
        if k == 0 {
            if self.is_empty() {
                return Err(QError::InsufficientPrecision);
            }
            return Ok(QSeries::one(self.precision - self.q_order()));
        }
        let mut base = if k < 0 { self.invert()? } else { self.clone() };
        let mut result: Option<QSeries> = None;
        let mut n = k.unsigned_abs();
        loop {
            if n & 1 == 1 {
                result = Some(match result {
                    None => base.clone(),
                    Some(r) => &r * &base,
                });
            }
            n >>= 1;
            if n == 0 {
                break;
            }
            base = &base * &base;
        }
        Ok(result.expect("k != 0"))
    }

    /// `q -> q^d`: every exponent and the horizon are multiplied by `d`.
    pub fn substitute_q_power(&self, d: u32) -> QSeries {
        assert!(d > 0, "substitution degree must be positive");
        let d = d as i64;
        let terms = self.terms.iter().map(|(e, c)| (*e * d, c.clone())).collect();
        QSeries { terms, precision: self.precision * d }
    }

    /// Exact comparison strictly below the smaller horizon.
    pub fn compare(&self, other: &QSeries) -> VerificationReport {
        let start = Instant::now();
        let horizon = self.precision.min(other.precision);
        let mut a = self.terms.range(..horizon).peekable();
        let mut b = other.terms.range(..horizon).peekable();
        let mismatch = loop {
            match (a.peek(), b.peek()) {
                (None, None) => break None,
                (Some((ea, ca)), Some((eb, cb))) => {
                    if ea == eb {
                        if ca != cb {
                            break Some(Mismatch { exponent: **ea, lhs: (*ca).clone(), rhs: (*cb).clone() });
                        }
                        a.next();
                        b.next();
                    } else if ea < eb {
                        break Some(Mismatch { exponent: **ea, lhs: (*ca).clone(), rhs: Coefficient::zero() });
                    } else {
                        break Some(Mismatch { exponent: **eb, lhs: Coefficient::zero(), rhs: (*cb).clone() });
                    }
                }
                (Some((ea, ca)), None) => {
                    break Some(Mismatch { exponent: **ea, lhs: (*ca).clone(), rhs: Coefficient::zero() })
                }
                (None, Some((eb, cb))) => {
                    break Some(Mismatch { exponent: **eb, lhs: Coefficient::zero(), rhs: (*cb).clone() })
                }
            }
        };
        let status = if mismatch.is_some() { VerificationStatus::Mismatch } else { VerificationStatus::Verified };
        VerificationReport { status, checked_to: horizon, first_mismatch: mismatch, elapsed: start.elapsed() }
    }

    /// Like [`QSeries::compare`], but agreement below a horizon smaller than
    /// `required` is reported as inconclusive.
    pub fn compare_to(&self, other: &QSeries, required: Exponent) -> VerificationReport {
        let mut report = self.compare(other);
        if report.status == VerificationStatus::Verified && report.checked_to < required {
            report.status = VerificationStatus::Inconclusive;
        }
        report
    }

    pub fn to_json(&self) -> SeriesJson {
        SeriesJson {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.numer(), e.denom(), c.numer().to_string(), c.denom().to_string()))
                .collect(),
            precision: (self.precision.numer(), self.precision.denom()),
        }
    }

    pub fn from_json(json: &SeriesJson) -> Result<QSeries> {
        let mut terms = Vec::with_capacity(json.terms.len());
        for (en, ed, cn, cd) in &json.terms {
            if *ed == 0 {
                return Err(QError::Malformed("zero exponent denominator".into()));
            }
            let c = parse_rational(&format!("{cn}/{cd}"))
                .ok_or_else(|| QError::Malformed(format!("bad coefficient {cn}/{cd}")))?;
            terms.push((Exponent::new(*en, *ed), c));
        }
        let (pn, pd) = json.precision;
        if pd == 0 {
            return Err(QError::Malformed("zero precision denominator".into()));
        }
        Ok(QSeries::from_terms(terms, Exponent::new(pn, pd)))
    }

    /// Largest absolute coefficient, for diagnostics.
    pub fn max_abs_coeff(&self) -> Option<f64> {
        self.terms.values().map(|c| c.abs().to_f64().unwrap_or(f64::INFINITY)).reduce(f64::max)
    }
}

/// JSON form: `[exp_num, exp_den, coeff_num, coeff_den]` quadruples (coefficient
/// parts as decimal integer strings) and the precision pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub terms: Vec<(i64, i64, String, String)>,
    pub precision: (i64, i64),
}

fn integer_scaled(s: &QSeries, order: Exponent, d: i64) -> (Vec<(i64, BigInt)>, BigInt) {
    let l = s.terms.values().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let lq = Coefficient::from_integer(l.clone());
    let v = s.terms.iter().map(|(e, c)| (((*e - order) * d).numer(), (c * &lq).to_integer())).collect();
    (v, l)
}

/// Recomputes `build` at growing working precision until the result is known
/// to `target`, then truncates to exactly `target`.
pub fn refine<F>(target: Exponent, mut build: F) -> Result<QSeries>
where
    F: FnMut(Exponent) -> Result<QSeries>,
{
    let step = Exponent::int(target.abs().ceil().max(8));
    let mut working = target;
    let mut last_err = QError::InsufficientPrecision;
    for _ in 0..10 {
        match build(working) {
            Ok(s) if s.precision() >= target => return Ok(s.truncate(target)),
            Ok(s) => {
                let deficit = target - s.precision();
                working = working + deficit.max(Exponent::ONE) + Exponent::int(2);
            }
            Err(QError::InsufficientPrecision) => {
                last_err = QError::InsufficientPrecision;
                working += step;
            }
            Err(e) => return Err(e),
        }
    }
    Err(last_err)
}

impl Add for &QSeries {
    type Output = QSeries;
    fn add(self, rhs: &QSeries) -> QSeries {
        self.add_series(rhs)
    }
}

impl Add for QSeries {
    type Output = QSeries;
    fn add(self, rhs: QSeries) -> QSeries {
        self.add_series(&rhs)
    }
}

impl Sub for &QSeries {
    type Output = QSeries;
    fn sub(self, rhs: &QSeries) -> QSeries {
        self.sub_series(rhs)
    }
}

impl Sub for QSeries {
    type Output = QSeries;
    fn sub(self, rhs: QSeries) -> QSeries {
        self.sub_series(&rhs)
    }
}

impl Mul for &QSeries {
    type Output = QSeries;
    fn mul(self, rhs: &QSeries) -> QSeries {
        self.mul_series(rhs)
    }
}

impl Mul for QSeries {
    type Output = QSeries;
    fn mul(self, rhs: QSeries) -> QSeries {
        self.mul_series(&rhs)
    }
}

impl Neg for &QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        self.neg_series()
    }
}

impl Neg for QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        self.neg_series()
    }
}

impl fmt::Display for QSeries {
    /// Canonical text: `c0*q^(e0) + c1*q^(e1) + ... + O(q^(P))`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (e, c) in &self.terms {
            write!(f, "{c}*q^({e}) + ")?;
        }
        write!(f, "O(q^({}))", self.precision)
    }
}

impl fmt::Debug for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for QSeries {
    type Err = QError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |part: &str| QError::Malformed(format!("bad series term `{part}`"));
        let parts: Vec<&str> = s.split(" + ").map(str::trim).collect();
        let (last, body) = parts.split_last().ok_or_else(|| bad(s))?;
        let precision = last
            .strip_prefix("O(q^(")
            .and_then(|r| r.strip_suffix("))"))
            .ok_or_else(|| bad(last))?
            .parse::<Exponent>()?;
        let mut terms = Vec::with_capacity(body.len());
        for part in body {
            let (c, e) = part.split_once("*q^(").ok_or_else(|| bad(part))?;
            let e = e.strip_suffix(')').ok_or_else(|| bad(part))?;
            let c = parse_rational(c).ok_or_else(|| bad(part))?;
            terms.push((e.parse::<Exponent>()?, c));
        }
        Ok(QSeries::from_terms(terms, precision))
    }
}

/// Shorthand used by tests and builders: integer coefficient list at
/// exponents `0, 1, 2, ...`.
pub fn from_int_coeffs(coeffs: &[i64], precision: impl Into<Exponent>) -> QSeries {
    QSeries::from_terms(
        coeffs.iter().enumerate().map(|(i, c)| (Exponent::int(i as i64), Coefficient::from_integer(BigInt::from(*c)))),
        precision,
    )
}
