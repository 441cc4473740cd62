//! The master formula `f_{n,n+p,n}(x,y,q) = g_{n,n+p,n}(x,y,q) + θ_{n,p}(x,y,q)`
//! expressing a family of Hecke-type double sums through Appell-Lerch sums
//! and a theta-function quotient.

use std::time::Instant;

use num_integer::Integer;
use serde::Serialize;

use crate::appell::{appell_m, AppellSpec};
use crate::error::{QError, Result};
use crate::hecke::{f_abc, HeckeParams};
use crate::series::{binom2, refine, Exponent, QSeries, SignedMonomial, VerificationReport};
use crate::theta::{big_j, theta_j, JVariant, ThetaSpec};

pub(crate) mod lattice;
mod replay;
mod signs;
mod windows;

pub use replay::{replay_proof, replay_proof_with, ReplayOptions, StageReport};
pub use signs::{lemma_sign_ids, lemma_sign_ids_perturbed, SignCounterexample, SignIdReport};
pub use windows::{check_windows, WindowCheck, WindowReport};

/// Coprime positive `n`, `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct MasterParams {
    pub n: i64,
    pub p: i64,
}

impl MasterParams {
    pub fn new(n: i64, p: i64) -> Result<Self> {
        if n < 1 || p < 1 {
            return Err(QError::InvalidParams(format!("n = {n}, p = {p} must be positive")));
        }
        if n.gcd(&p) != 1 {
            return Err(QError::InvalidParams(format!("n = {n} and p = {p} must be coprime")));
        }
        Ok(MasterParams { n, p })
    }

    /// `p(2n+p)`, the discriminant `b² - ac` of `(n, n+p, n)`.
    pub fn d(&self) -> i64 {
        self.p * (2 * self.n + self.p)
    }

    pub fn hecke(&self) -> HeckeParams {
        HeckeParams { a: self.n, b: self.n + self.p, c: self.n }
    }
}

/// Monomial values for `x` and `y`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Specialization {
    pub x: SignedMonomial,
    pub y: SignedMonomial,
}

impl Specialization {
    pub fn new(x: SignedMonomial, y: SignedMonomial) -> Self {
        Specialization { x, y }
    }
}

/// `g_{a,b,c}(x, y, q)`: two finite sums of theta functions times
/// Appell-Lerch sums with base `q^{a(b²-ac)}` resp. `q^{c(b²-ac)}`.
pub fn g_abc(a: i64, b: i64, c: i64, x: &SignedMonomial, y: &SignedMonomial, precision: Exponent) -> Result<QSeries> {
    let h = HeckeParams::new(a, b, c)?;
    let disc = h.discriminant();
    if disc <= 0 {
        return Err(QError::InvalidParams(format!("g_{{{a},{b},{c}}} needs b² - ac > 0")));
    }
    // each half: Σ_t (-v)^t q^{k C(t,2)} j(q^{bt} u; q^l) m(-q^{e - t disc} (-v)^l/(-u)^b, q^{l disc}, -1)
    let half = |u: &SignedMonomial, v: &SignedMonomial, l: i64, k: i64, wp: Exponent| -> Result<QSeries> {
        let (neg_u, neg_v) = (-u, -v);
        let mut sum = QSeries::zero(wp);
        for t in 0..l {
            let lead = &neg_v.powi(t) * &SignedMonomial::q_pow(k * binom2(t));
            let theta = theta_j(&ThetaSpec::new(u * &SignedMonomial::q_pow(b * t), SignedMonomial::q_pow(l))?, wp)?;
            let arg = -(&(&SignedMonomial::q_pow(l * binom2(b + 1) - k * binom2(l + 1) - t * disc) * &neg_v.powi(l))
                * &neg_u.powi(-b));
            let m = appell_m(&AppellSpec::at_minus_one(arg, SignedMonomial::q_pow(l * disc))?, wp)?;
            sum = &sum + &(&theta * &m).mul_monomial(&lead);
        }
        Ok(sum)
    };
    refine(precision, |wp| Ok(&half(x, y, a, c, wp)? + &half(y, x, c, a, wp)?))
}

/// One `(r*, s*)` summand of `θ_{n,p}`, before the common `J³/J̄` factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThetaNpTerm {
    pub r: Exponent,
    pub s: Exponent,
    pub prefactor: SignedMonomial,
    pub numerators: [ThetaSpec; 2],
    pub denominators: [ThetaSpec; 2],
}

/// The `p²` summands of `θ_{n,p}`, checked for genericity.
pub fn theta_np_terms(mp: MasterParams, spec: &Specialization) -> Result<Vec<ThetaNpTerm>> {
    let (n, p, d) = (mp.n, mp.p, mp.d());
    let frac = Exponent::new(n - 1, 2).fract_part();
    let (neg_x, neg_y) = (-&spec.x, -&spec.y);
    let q = SignedMonomial::q_pow;
    let mut terms = Vec::with_capacity((p * p) as usize);
    for r_star in 0..p {
        for s_star in 0..p {
            let r = frac + r_star;
            let s = frac + s_star;
            let big_r = r - Exponent::new(n - 1, 2);
            let big_s = s + Exponent::new(n + 1, 2);
            let lead = big_r.binom2() * n + big_r * big_s * (n + p) + big_s.binom2() * n;
            let prefactor = &(&q(lead) * &neg_x.pow(big_r)?) * &neg_y.pow(big_s)?;
            let num1 = -(&(&q((s - r) * (n * p)) * &spec.x.powi(n)) * &spec.y.powi(-n));
            let num2 = &(&q((r + s) * d + p * (n + p)) * &spec.x.powi(p)) * &spec.y.powi(p);
            let half_shift = Exponent::new(p * (n + p), 2);
            let den1 = &(&q(r * d + half_shift) * &neg_y.powi(n + p)) * &neg_x.powi(-n);
            let den2 = &(&q(s * d + half_shift) * &neg_x.powi(n + p)) * &neg_y.powi(-n);
            let wide = q(Exponent::int(p * d));
            let denominators = [ThetaSpec::new(den1, wide.clone())?, ThetaSpec::new(den2, wide.clone())?];
            for den in &denominators {
                if den.vanishes() {
                    return Err(QError::NonGenericSpecialization(format!(
                        "j({}; {}) vanishes at (r*, s*) = ({r_star}, {s_star})",
                        den.arg, den.base
                    )));
                }
            }
            terms.push(ThetaNpTerm {
                r,
                s,
                prefactor,
                numerators: [ThetaSpec::new(num1, q(Exponent::int(n * p * p)))?, ThetaSpec::new(num2, wide)?],
                denominators,
            });
        }
    }
    Ok(terms)
}

/// `J̄_{0,np(2n+p)} θ_{n,p}(x, y, q)`, i.e. the quotient without its `J̄` denominator.
pub(crate) fn theta_np_times_jbar(mp: MasterParams, spec: &Specialization, precision: Exponent) -> Result<QSeries> {
    let terms = theta_np_terms(mp, spec)?;
    let pd = mp.p * mp.d();
    refine(precision, |wp| {
        let mut sum = QSeries::zero(wp);
        for t in &terms {
            let num = &theta_j(&t.numerators[0], wp)? * &theta_j(&t.numerators[1], wp)?;
            let den = &theta_j(&t.denominators[0], wp)? * &theta_j(&t.denominators[1], wp)?;
            sum = &sum + &num.div(&den)?.mul_monomial(&t.prefactor);
        }
        Ok(&sum * &big_j(0, pd, JVariant::Eta, wp)?.powi(3)?)
    })
}

/// `θ_{n,p}(x, y, q)`.
pub fn theta_np(mp: MasterParams, spec: &Specialization, precision: Exponent) -> Result<QSeries> {
    let nd = mp.n * mp.d();
    refine(precision, |wp| theta_np_times_jbar(mp, spec, wp)?.div(&big_j(0, nd, JVariant::Bar, wp)?))
}

/// Compares `f_{n,n+p,n}` with `g_{n,n+p,n} + θ_{n,p}`.
pub fn verify_master(mp: MasterParams, spec: &Specialization, precision: Exponent) -> Result<VerificationReport> {
    let start = Instant::now();
    let (n, b) = (mp.n, mp.n + mp.p);
    let theta = theta_np(mp, spec, precision)?;
    let f = f_abc(mp.hecke(), &spec.x, &spec.y, precision)?;
    let g = g_abc(n, b, n, &spec.x, &spec.y, precision)?;
    Ok(f.compare_to(&(&g + &theta), precision).with_elapsed(start.elapsed()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::coeff;

    fn p(n: i64) -> Exponent {
        Exponent::int(n)
    }

    fn mono(s: &str) -> SignedMonomial {
        s.parse().unwrap()
    }

    fn spec(x: &str, y: &str) -> Specialization {
        Specialization::new(mono(x), mono(y))
    }

    #[test]
    fn params_need_coprime_positive() {
        assert!(MasterParams::new(2, 4).is_err());
        assert!(MasterParams::new(0, 1).is_err());
        assert_eq!(MasterParams::new(3, 2).unwrap().d(), 16);
    }

    #[test]
    fn grid_has_p_squared_terms() {
        for (n, pp) in [(1, 1), (1, 2), (2, 3), (3, 2), (1, 3)] {
            let mp = MasterParams::new(n, pp).unwrap();
            let terms = theta_np_terms(mp, &spec("q^(1/3)", "2*q^(1/5)")).unwrap();
            assert_eq!(terms.len() as i64, pp * pp);
        }
    }

    #[test]
    fn fractional_parts_of_the_grid() {
        // odd n: integral r, s; even n: half-integral r, s but integral R, S,
        // so no fractional power of -x or -y is ever taken
        let odd = theta_np_terms(MasterParams::new(3, 2).unwrap(), &spec("q", "q")).unwrap();
        assert!(odd.iter().all(|t| t.r.is_integer() && t.s.is_integer()));
        let even = theta_np_terms(MasterParams::new(2, 1).unwrap(), &spec("q", "q^2")).unwrap();
        for t in &even {
            assert_eq!((t.r.denom(), t.s.denom()), (2, 2));
            assert!((t.r - Exponent::new(1, 2)).is_integer());
            assert!(t.prefactor.exp().is_integer());
        }
    }

    #[test]
    fn n_one_p_one_closed_form() {
        // θ_{1,1} = -y J_3³ j(-x/y;q) j(q²xy;q³) / (J̄_{0,3} j(-qy²/x;q³) j(-qx²/y;q³))
        let (x, y) = (mono("q^(1/2)"), mono("-2*q^(1/3)"));
        let mp = MasterParams::new(1, 1).unwrap();
        let theta = theta_np(mp, &Specialization::new(x.clone(), y.clone()), p(20)).unwrap();
        let q = SignedMonomial::q_pow;
        let wp = p(40);
        let num = &(&big_j(0, 3, JVariant::Eta, wp).unwrap().powi(3).unwrap()
            * &theta_j(&ThetaSpec::new(-(&x * &y.recip()), q(1)).unwrap(), wp).unwrap())
            * &theta_j(&ThetaSpec::new(&(&q(2) * &x) * &y, q(3)).unwrap(), wp).unwrap();
        let den = &(&big_j(0, 3, JVariant::Bar, wp).unwrap()
            * &theta_j(&ThetaSpec::new(-(&(&q(1) * &y.powi(2)) * &x.recip()), q(3)).unwrap(), wp).unwrap())
            * &theta_j(&ThetaSpec::new(-(&(&q(1) * &x.powi(2)) * &y.recip()), q(3)).unwrap(), wp).unwrap();
        let closed = num.div(&den).unwrap().mul_monomial(&-&y);
        assert!(theta.compare(&closed).is_verified());
    }

    #[test]
    fn non_generic_denominator() {
        let r = theta_np(MasterParams::new(1, 1).unwrap(), &spec("-q^2", "q^2"), p(10));
        assert!(matches!(r, Err(QError::NonGenericSpecialization(_))));
    }

    #[test]
    fn g_with_unit_outer_subscripts_has_two_terms() {
        // a = c = 1: g = j(x;q) m(-q^{C(b+1,2)-1}(-y)/(-x)^b, q^{D}, -1) + (x <-> y)
        let (x, y) = (mono("q^(1/2)"), mono("q^(1/3)"));
        let g = g_abc(1, 2, 1, &x, &y, p(20)).unwrap();
        let q = SignedMonomial::q_pow;
        let arg1 = -(&(&q(2) * &-&y) * &(-&x).powi(-2));
        let arg2 = -(&(&q(2) * &-&x) * &(-&y).powi(-2));
        let t1 = &theta_j(&ThetaSpec::new(x.clone(), q(1)).unwrap(), p(40)).unwrap()
            * &appell_m(&AppellSpec::at_minus_one(arg1, q(3)).unwrap(), p(40)).unwrap();
        let t2 = &theta_j(&ThetaSpec::new(y.clone(), q(1)).unwrap(), p(40)).unwrap()
            * &appell_m(&AppellSpec::at_minus_one(arg2, q(3)).unwrap(), p(40)).unwrap();
        assert!(g.compare(&(&t1 + &t2)).is_verified());
    }

    #[test]
    fn g_pole_is_reported() {
        // first Appell argument: -q^2 (-y)/(-x)^2 = -1 · (-1)·q^{2+...}; pick y so xz = q^{3k}
        // arg = -q^2 (-y) / x^2; with x = q, y = -q^3: arg = -q^3, xz = q^3
        let r = g_abc(1, 2, 1, &mono("q"), &mono("-q^3"), p(10));
        assert!(matches!(r, Err(QError::PoleAtSpecialization(_))));
    }

    #[test]
    fn master_small_cases() {
        for ((n, pp), (x, y)) in [((1, 1), ("q", "q")), ((1, 2), ("-q^3", "-q^5")), ((2, 1), ("-q", "-q^2"))] {
            let r = verify_master(MasterParams::new(n, pp).unwrap(), &spec(x, y), p(40)).unwrap();
            assert!(r.is_verified(), "({n},{pp}) at ({x},{y}): {r}");
        }
    }

    #[test]
    fn g_equals_f_minus_theta_at_q() {
        let mp = MasterParams::new(1, 1).unwrap();
        let s = spec("q", "q");
        let f = f_abc(mp.hecke(), &s.x, &s.y, p(20)).unwrap();
        let g = g_abc(1, 2, 1, &s.x, &s.y, p(20)).unwrap();
        let theta = theta_np(mp, &s, p(20)).unwrap();
        assert!(g.compare(&(&f - &theta)).is_verified());
        assert_eq!(f.coeff(Exponent::ZERO), coeff(1));
    }

    #[test]
    fn even_n_with_positive_x_still_verifies() {
        // R and S are integers for even n, so a negative -x coefficient is fine
        let r = verify_master(MasterParams::new(2, 1).unwrap(), &spec("q", "q^2"), p(30)).unwrap();
        assert!(r.is_verified(), "{r}");
    }
}
