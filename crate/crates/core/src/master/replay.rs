//! Executable replay of the odd-`n` proof of the master formula: both sides
//! of `J̄ (f - g) = J̄ θ` are rewritten step by step into multiple sums and
//! every rewrite is checked against its predecessor.
//!
//! The split of the theta side into two halves produces sums that diverge
//! individually (the quadratic form is indefinite on the full lattice). Those
//! stages, and the final matching against the left side, are evaluated on a
//! common finite box of `(r, s, w)` that contains the sub-horizon support of
//! every convergent stage; inside it the comparison is exact in every
//! exponent, including the very negative ones that cancel between halves.

use std::time::Instant;

use serde::Serialize;

use super::lattice::{sign_pair_cells, Affine, LatticeSum, Limits, Term};
use super::windows::check_windows;
use super::{g_abc, theta_np_times_jbar, MasterParams, Specialization};
use crate::error::{QError, Result};
use crate::hecke::{f_abc, sg, sg2};
use crate::series::{binom2, pow_rational, ratio, Coefficient, Exponent, QSeries, VerificationReport};
use crate::theta::{big_j, JVariant};

/// The verdict for one rewrite.
#[derive(Debug, Clone, Serialize)]
pub struct StageReport {
    pub stage: &'static str,
    pub description: &'static str,
    #[serde(skip)]
    pub report: VerificationReport,
}

impl StageReport {
    pub fn is_verified(&self) -> bool {
        self.report.is_verified()
    }
}

/// Enumeration knobs; `scan_scale = 2` doubles every outer-scan run length.
#[derive(Debug, Clone, Copy)]
pub struct ReplayOptions {
    pub scan_scale: i64,
    pub box_margin: i64,
}

impl Default for ReplayOptions {
    fn default() -> Self {
        ReplayOptions { scan_scale: 1, box_margin: 2 }
    }
}

/// Replays the proof for odd `n` at a specialization inside every window.
pub fn replay_proof(mp: MasterParams, spec: &Specialization, precision: Exponent) -> Result<Vec<StageReport>> {
    replay_proof_with(mp, spec, precision, ReplayOptions::default())
}

pub fn replay_proof_with(
    mp: MasterParams,
    spec: &Specialization,
    precision: Exponent,
    opts: ReplayOptions,
) -> Result<Vec<StageReport>> {
    if mp.n % 2 == 0 {
        return Err(QError::InvalidParams("the proof replay covers odd n only".into()));
    }
    let windows = check_windows(mp, spec);
    if !windows.hypotheses_hold() || !windows.conclusions_hold() {
        return Err(QError::WindowViolation(format!(
            "specialization ({}, {}) lies outside the convergence windows",
            spec.x, spec.y
        )));
    }
    let mut limits = Limits::default();
    for _ in 1..opts.scan_scale.max(1) {
        limits = limits.doubled();
    }
    Replay { mp, spec, precision, limits, margin: opts.box_margin, reports: Vec::new() }.run()
}

struct Replay<'a> {
    mp: MasterParams,
    spec: &'a Specialization,
    precision: Exponent,
    limits: Limits,
    margin: i64,
    reports: Vec<StageReport>,
}

fn var(j: usize, konst: i64) -> Affine {
    let mut coef = vec![0; 3];
    coef[j] = 1;
    Affine::new(coef, konst)
}

fn series_of(terms: &[Term], precision: Exponent) -> QSeries {
    QSeries::from_terms(terms.iter().map(|t| (t.exp, t.coeff.clone())), precision)
}

/// Which of the four Appell-Lerch blocks: the first two carry `(-x)^{k+n·}`,
/// the last two `(-y)^{k+n·}`; blocks 1 and 3 have `k <= (n-1)/2`.
#[derive(Debug, Clone, Copy)]
struct Block {
    x_side: bool,
    low: bool,
}

const BLOCKS: [Block; 4] = [
    Block { x_side: true, low: true },
    Block { x_side: true, low: false },
    Block { x_side: false, low: true },
    Block { x_side: false, low: false },
];

impl Block {
    fn ks(self, n: i64) -> std::ops::Range<i64> {
        let h = (n - 1) / 2;
        if self.low {
            0..h + 1
        } else {
            h + 1..n
        }
    }

    /// Orders the (lead, other) powers as (x power, y power).
    fn orient(self, lead: i64, other: i64) -> (i64, i64) {
        if self.x_side {
            (lead, other)
        } else {
            (other, lead)
        }
    }
}

impl Replay<'_> {
    fn np(&self) -> (i64, i64, i64, i64, i64) {
        let (n, p) = (self.mp.n, self.mp.p);
        let d = self.mp.d();
        (n, p, d, n * d, (n - 1) / 2)
    }

    fn record(&mut self, stage: &'static str, description: &'static str, report: VerificationReport) {
        self.reports.push(StageReport { stage, description, report });
    }

    fn compare(
        &mut self,
        stage: &'static str,
        description: &'static str,
        lhs: &QSeries,
        rhs: &QSeries,
        start: Instant,
    ) {
        let report = lhs.compare_to(rhs, self.precision).with_elapsed(start.elapsed());
        self.record(stage, description, report);
    }

    fn enumerate(&self, sum: &LatticeSum<'_>) -> Result<Vec<Term>> {
        sum.terms(&self.spec.x, &self.spec.y, self.precision, self.limits)
    }

    /// `n C(r,2) + (n+p) r s + n C(s,2) + N C(w+1,2)`, the exponent shared by
    /// every stage once written in the final coordinates.
    fn shared_exponent(&self, r: i64, s: i64, w: i64) -> i64 {
        let (n, p, _, nn, _) = self.np();
        n * binom2(r) + (n + p) * r * s + n * binom2(s) + nn * binom2(w + 1)
    }

    fn rh1(&self) -> Result<Vec<Term>> {
        let (n, p, d, _, h) = self.np();
        // indices (r, s, t, u, v)
        let axis = |j: usize, konst: i64, sign: i64| {
            let mut coef = vec![0; 5];
            coef[j] = sign;
            Affine::new(coef, konst)
        };
        let box_rs = [axis(0, 0, 1), axis(0, p - 1, -1), axis(1, 0, 1), axis(1, p - 1, -1)];
        let sum = LatticeSum {
            dim: 5,
            cells: sign_pair_cells(&axis(2, 0, 1), &axis(3, 0, 1), &box_rs),
            q_part: Box::new(move |i: &[i64]| {
                let (r, s, t, u, v) = (i[0], i[1], i[2], i[3], i[4]);
                let big_r = r - h;
                let big_s = s + h + 1;
                let whole = n * binom2(big_r)
                    + (n + p) * big_r * big_s
                    + n * binom2(big_s)
                    + n * p * p * binom2(v)
                    + n * p * (s - r) * v
                    + p * d * t * u
                    + d * (r * t + s * u);
                Exponent::int(whole) + Exponent::new(p * (t + u) * (n + p), 2)
            }),
            powers: Box::new(move |i: &[i64]| {
                let (r, s, t, u, v) = (i[0], i[1], i[2], i[3], i[4]);
                (r + (n + p) * u - n * t + n * v - h, s + (n + p) * t - n * u - n * v + h + 1)
            }),
        };
        self.enumerate(&sum)
    }

    fn rh2(&self) -> Result<Vec<Term>> {
        let (n, p, _, nn, h) = self.np();
        // indices (R, S, w)
        let sum = LatticeSum {
            dim: 3,
            cells: sign_pair_cells(&var(0, 0), &var(1, 0), &[]),
            q_part: Box::new(move |i: &[i64]| {
                let a = i[0] - n * i[2] - h;
                let b = i[1] + n * i[2] + h + 1;
                Exponent::int(n * binom2(a) + (n + p) * a * b + n * binom2(b) + nn * binom2(i[2] + 1))
            }),
            powers: Box::new(move |i: &[i64]| (i[0] - n * i[2] - h, i[1] + n * i[2] + h + 1)),
        };
        self.enumerate(&sum)
    }

    /// Indices `(w, r, s)`.
    fn rh3(&self) -> Result<Vec<Term>> {
        let (n, _, _, _, h) = self.np();
        let first = Affine::new(vec![n, 1, 0], h);
        let second = Affine::new(vec![-n, 0, 1], -h - 1);
        let sum = LatticeSum {
            dim: 3,
            cells: sign_pair_cells(&first, &second, &[]),
            q_part: Box::new(move |i: &[i64]| Exponent::int(self.shared_exponent(i[1], i[2], i[0]))),
            powers: Box::new(|i: &[i64]| (i[1], i[2])),
        };
        self.enumerate(&sum)
    }

    /// Indices `(w, r, s)`.
    fn lh1(&self) -> Result<Vec<Term>> {
        let sum = LatticeSum {
            dim: 3,
            cells: sign_pair_cells(&var(1, 0), &var(2, 0), &[]),
            q_part: Box::new(move |i: &[i64]| Exponent::int(self.shared_exponent(i[1], i[2], i[0]))),
            powers: Box::new(|i: &[i64]| (i[1], i[2])),
        };
        self.enumerate(&sum)
    }

    /// The Appell-Lerch side after expanding each `J̄ m` as a double sum;
    /// indices `(s, v, t)`.
    fn lh2b(&self) -> Result<Vec<Term>> {
        let (n, p, d, nn, _) = self.np();
        let m = n * (n * p + binom2(p + 1));
        let mut out = Vec::new();
        for block in BLOCKS {
            for k in block.ks(n) {
                let sum = LatticeSum {
                    dim: 3,
                    cells: sign_pair_cells(&var(1, 0), &var(0, 0), &[]),
                    q_part: Box::new(move |i: &[i64]| {
                        let (s, v, t) = (i[0], i[1], i[2]);
                        let lemma = if block.low { binom2(v + 1) + v * s } else { binom2(v + 1) + (v + 1) * (s + 1) };
                        Exponent::int(n * binom2(k) + n * binom2(t) + (n + p) * k * t + m * s - k * d * s + nn * lemma)
                    }),
                    powers: Box::new(move |i: &[i64]| block.orient(k + n * i[0], i[2] - i[0] * (n + p))),
                };
                out.extend(self.enumerate(&sum)?);
            }
        }
        Ok(out)
    }

    /// After `t = (n+p)s + r`; indices `(s, v, r)`.
    fn lh2c(&self) -> Result<Vec<Term>> {
        let (n, p, _, nn, _) = self.np();
        let mut out = Vec::new();
        for block in BLOCKS {
            for k in block.ks(n) {
                let sum = LatticeSum {
                    dim: 3,
                    cells: sign_pair_cells(&var(1, 0), &var(0, 0), &[]),
                    q_part: Box::new(move |i: &[i64]| {
                        let (s, v, r) = (i[0], i[1], i[2]);
                        let top = if block.low { s + v + 1 } else { s + v + 2 };
                        let lead = n * s + k;
                        Exponent::int(n * binom2(r) + (n + p) * r * lead + n * binom2(lead) + nn * binom2(top))
                    }),
                    powers: Box::new(move |i: &[i64]| block.orient(k + n * i[0], i[2])),
                };
                out.extend(self.enumerate(&sum)?);
            }
        }
        Ok(out)
    }

    /// The first two blocks with `r` and `s` renamed; indices `(r, v, s)`.
    fn lh2d(&self) -> Result<Vec<Term>> {
        let (n, _p, _, _, _) = self.np();
        let mut out = Vec::new();
        for block in BLOCKS {
            if !block.x_side {
                continue;
            }
            for k in block.ks(n) {
                let sum = LatticeSum {
                    dim: 3,
                    cells: sign_pair_cells(&var(1, 0), &var(0, 0), &[]),
                    q_part: Box::new(move |i: &[i64]| {
                        let (r, v, s) = (i[0], i[1], i[2]);
                        let top = if block.low { r + v + 1 } else { r + v + 2 };
                        let lead = n * r + k;
                        Exponent::int(self.rename_exponent(lead, s, top))
                    }),
                    powers: Box::new(move |i: &[i64]| (k + n * i[0], i[2])),
                };
                out.extend(self.enumerate(&sum)?);
            }
        }
        // the y-side blocks are unchanged
        let (n, p, _, nn, _) = self.np();
        for block in BLOCKS {
            if block.x_side {
                continue;
            }
            for k in block.ks(n) {
                let sum = LatticeSum {
                    dim: 3,
                    cells: sign_pair_cells(&var(1, 0), &var(0, 0), &[]),
                    q_part: Box::new(move |i: &[i64]| {
                        let (s, v, r) = (i[0], i[1], i[2]);
                        let top = if block.low { s + v + 1 } else { s + v + 2 };
                        let lead = n * s + k;
                        Exponent::int(n * binom2(r) + (n + p) * r * lead + n * binom2(lead) + nn * binom2(top))
                    }),
                    powers: Box::new(move |i: &[i64]| (i[2], k + n * i[0])),
                };
                out.extend(self.enumerate(&sum)?);
            }
        }
        Ok(out)
    }

    /// `n C(other,2) + (n+p) other·lead + n C(lead,2) + N C(top,2)`.
    fn rename_exponent(&self, lead: i64, other: i64, top: i64) -> i64 {
        let (n, p, _, nn, _) = self.np();
        n * binom2(other) + (n + p) * other * lead + n * binom2(lead) + nn * binom2(top)
    }

    /// The sign weight of the fully substituted Appell-Lerch blocks at block
    /// index `j` (the `r` of the x-side blocks, the `s` of the y-side ones).
    fn lh2e_weight(block: Block, j: i64, w: i64) -> i64 {
        match (block.x_side, block.low) {
            (true, true) => sg2(-w - 1 - j, j),
            (true, false) => sg2(-w - 2 - j, j),
            (false, true) => sg2(w - j, j),
            (false, false) => sg2(w - 1 - j, j),
        }
    }

    /// After substituting for `v`; indices `(j, w, other)` where `j` is the
    /// block index and `other` the free power.
    fn lh2e(&self) -> Result<Vec<(Block, i64, Term)>> {
        let (n, _, _, _, _) = self.np();
        let mut out = Vec::new();
        for block in BLOCKS {
            let shift = if block.low { 1 } else { 2 } - 1;
            // x side: sg(-w-1-j, j) or sg(-w-2-j, j); y side: sg(w-j, j) or sg(w-1-j, j)
            let first = if block.x_side {
                Affine::new(vec![-1, -1, 0], -1 - shift)
            } else {
                Affine::new(vec![-1, 1, 0], -shift)
            };
            for k in block.ks(n) {
                let sum = LatticeSum {
                    dim: 3,
                    cells: sign_pair_cells(&first, &var(0, 0), &[]),
                    q_part: Box::new(move |i: &[i64]| {
                        let (j, w, other) = (i[0], i[1], i[2]);
                        Exponent::int(self.rename_exponent(n * j + k, other, w + 1))
                    }),
                    powers: Box::new(move |i: &[i64]| block.orient(k + n * i[0], i[2])),
                };
                out.extend(self.enumerate(&sum)?.into_iter().map(|t| (block, k, t)));
            }
        }
        Ok(out)
    }

    /// `(-x)^a (-y)^b q^{e + a ex + b ey}` scaled by `weight`.
    fn term(&self, weight: Coefficient, a: i64, b: i64, e: i64) -> (Exponent, Coefficient) {
        let (x, y) = (&self.spec.x, &self.spec.y);
        let exp = Exponent::int(e) + x.exp() * a + y.exp() * b;
        let c = weight * pow_rational(&-x.coeff().clone(), a) * pow_rational(&-y.coeff().clone(), b);
        (exp, c)
    }

    fn run(mut self) -> Result<Vec<StageReport>> {
        let (n, p, _, nn, h) = self.np();
        let prec = self.precision;
        let (x, y) = (self.spec.x.clone(), self.spec.y.clone());

        // right side
        let t0 = Instant::now();
        let rhs = theta_np_times_jbar(self.mp, self.spec, prec)?;
        let rh1 = series_of(&self.rh1()?, prec);
        self.compare("rh1", "theta quotient expanded by the bilateral summation", &rh1, &rhs, t0);

        let t0 = Instant::now();
        let rh2 = series_of(&self.rh2()?, prec);
        self.compare("rh2", "r = R - pu, s = S - pt, v = t - u - w", &rh2, &rh1, t0);

        let t0 = Instant::now();
        let rh3_terms = self.rh3()?;
        let rh3 = series_of(&rh3_terms, prec);
        self.compare("rh3", "R = r + nw + (n-1)/2, S = s - nw - (n+1)/2", &rh3, &rh2, t0);

        // left side
        let t0 = Instant::now();
        // J̄ carried deep enough that a negative order in f or g costs nothing
        let f = f_abc(self.mp.hecke(), &x, &y, prec)?;
        let g = g_abc(n, n + p, n, &x, &y, prec)?;
        let depth = Exponent::ZERO.max(-f.q_order()).max(-g.q_order());
        let jbar = big_j(0, nn, JVariant::Bar, prec + depth)?;
        let lh1_terms = self.lh1()?;
        let lh1 = series_of(&lh1_terms, prec);
        self.compare("lh1", "J̄ f as a triple sum", &lh1, &(&jbar * &f), t0);

        let t0 = Instant::now();
        let lh2a = -(&jbar * &g);
        let lh2b = series_of(&self.lh2b()?, prec);
        self.compare("lh2B", "-J̄ g with each J̄ m expanded as a double sum", &lh2b, &-&lh2a, t0);

        let t0 = Instant::now();
        let lh2c = series_of(&self.lh2c()?, prec);
        self.compare("lh2C", "t = (n+p)s + r", &lh2c, &lh2b, t0);

        let t0 = Instant::now();
        let lh2d = series_of(&self.lh2d()?, prec);
        self.compare("lh2D", "r and s exchanged in the x-side blocks", &lh2d, &lh2c, t0);

        let t0 = Instant::now();
        let lh2e_terms = self.lh2e()?;
        let lh2e = series_of(&lh2e_terms.iter().map(|(_, _, t)| t.clone()).collect::<Vec<_>>(), prec);
        self.compare("lh2E", "v eliminated by the four substitutions", &lh2e, &lh2d, t0);

        // the common box in (r, s, w)
        let mut lo = [i64::MAX; 3];
        let mut hi = [i64::MIN; 3];
        let mut include = |pt: [i64; 3]| {
            for j in 0..3 {
                lo[j] = lo[j].min(pt[j]);
                hi[j] = hi[j].max(pt[j]);
            }
        };
        for t in rh3_terms.iter().chain(&lh1_terms) {
            include([t.index[1], t.index[2], t.index[0]]);
        }
        for (block, k, t) in &lh2e_terms {
            let (j, w, other) = (t.index[0], t.index[1], t.index[2]);
            let lead = n * j + k;
            include(if block.x_side { [lead, other, w] } else { [other, lead, w] });
        }
        include([0, 0, 0]);
        let m = self.margin;

        let t0 = Instant::now();
        let half = ratio(1, 2);
        let (mut rh4a, mut rh4b, mut rh5, mut lh1_box, mut lh2e_box) = (vec![], vec![], vec![], vec![], vec![]);
        for r in lo[0] - m..=hi[0] + m {
            for s in lo[1] - m..=hi[1] + m {
                for w in lo[2] - m..=hi[2] + m {
                    let e = self.shared_exponent(r, s, w);
                    let sg_a = Coefficient::from_integer(sg(r + n * w + h).into());
                    let sg_b = Coefficient::from_integer(sg(s - n * w - h - 1).into());
                    rh4a.push(self.term(&half * sg_a, r, s, e));
                    rh4b.push(self.term(&half * sg_b, r, s, e));
                    // k-decomposed halves, each written with its own display
                    let (rq, rk) = (r.div_euclid(n), r.rem_euclid(n));
                    let (sq, sk) = (s.div_euclid(n), s.rem_euclid(n));
                    let lead_r = n * rq + rk;
                    let lead_s = n * sq + sk;
                    let e1 = n * binom2(lead_r) + (n + p) * lead_r * s + n * binom2(s) + nn * binom2(w + 1);
                    let e2 = n * binom2(r) + (n + p) * r * lead_s + n * binom2(lead_s) + nn * binom2(w + 1);
                    let w1 = &half * Coefficient::from_integer(sg(n * rq + rk + n * w + h).into());
                    let w2 = &half * Coefficient::from_integer(sg(n * sq + sk - n * w - h - 1).into());
                    rh5.push(self.term(w1, lead_r, s, e1));
                    rh5.push(self.term(w2, r, lead_s, e2));
                    let w_lh1 = sg2(r, s);
                    if w_lh1 != 0 {
                        lh1_box.push(self.term(Coefficient::from_integer(w_lh1.into()), r, s, e));
                    }
                    for block in BLOCKS {
                        let (j, k, other) = if block.x_side { (rq, rk, s) } else { (sq, sk, r) };
                        if block.low != (k <= h) {
                            continue;
                        }
                        let wt = Self::lh2e_weight(block, j, w);
                        if wt != 0 {
                            let (a, b) = block.orient(n * j + k, other);
                            let ee = self.rename_exponent(n * j + k, other, w + 1);
                            lh2e_box.push(self.term(Coefficient::from_integer(wt.into()), a, b, ee));
                        }
                    }
                }
            }
        }
        let top = rh4a
            .iter()
            .chain(&rh4b)
            .chain(&rh5)
            .chain(&lh1_box)
            .chain(&lh2e_box)
            .map(|(e, _)| *e)
            .max()
            .unwrap_or(Exponent::ZERO)
            + 1;
        let exact = |v: Vec<(Exponent, Coefficient)>| QSeries::from_terms(v, top);
        let rh4a = exact(rh4a);
        let rh4b = exact(rh4b);
        let rh4 = &rh4a + &rh4b;
        let rh5 = exact(rh5);
        let lh1_box = exact(lh1_box);
        let lh2e_box = exact(lh2e_box);
        self.compare("rh4", "sg(A, B) split into its two halves (box)", &rh4.truncate(prec), &rh3, t0);
        let report = rh5.compare(&rh4).with_elapsed(t0.elapsed());
        self.record("rh5", "each half re-indexed by residues mod n (box, exact)", report);

        let t0 = Instant::now();
        let left_box = &lh1_box - &lh2e_box;
        let report = left_box.compare(&rh5).with_elapsed(t0.elapsed());
        self.record("assembly", "lh1 - lh2E equals rh5 term by term via the sign identities (box, exact)", report);
        self.compare(
            "box",
            "the box holds every sub-horizon term of lh1 and lh2E",
            &left_box.truncate(prec),
            &(&lh1 - &lh2e),
            t0,
        );

        let t0 = Instant::now();
        self.compare("total", "J̄ (f - g) equals J̄ θ", &(&lh1 + &lh2a), &rhs, t0);
        Ok(self.reports)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::SignedMonomial;

    fn p(n: i64) -> Exponent {
        Exponent::int(n)
    }

    fn spec(x: &str, y: &str) -> Specialization {
        Specialization::new(x.parse::<SignedMonomial>().unwrap(), y.parse().unwrap())
    }

    fn all_verified(reports: &[StageReport]) -> bool {
        reports.iter().all(|r| r.is_verified())
    }

    #[test]
    fn replay_n1_p2() {
        let reports = replay_proof(MasterParams::new(1, 2).unwrap(), &spec("q", "q"), p(20)).unwrap();
        for r in &reports {
            assert!(r.is_verified(), "{}: {}", r.stage, r.report);
        }
        assert_eq!(reports.len(), 13);
    }

    #[test]
    fn replay_n3_p2() {
        let reports = replay_proof(MasterParams::new(3, 2).unwrap(), &spec("q", "2*q^(3/2)"), p(15)).unwrap();
        for r in &reports {
            assert!(r.is_verified(), "{}: {}", r.stage, r.report);
        }
    }

    #[test]
    fn out_of_window_is_refused() {
        let r = replay_proof(MasterParams::new(1, 2).unwrap(), &spec("q", "q^3"), p(10));
        assert!(matches!(r, Err(QError::WindowViolation(_))));
        assert!(matches!(
            replay_proof(MasterParams::new(2, 1).unwrap(), &spec("q", "q"), p(10)),
            Err(QError::InvalidParams(_))
        ));
    }

    #[test]
    fn doubling_scans_changes_nothing() {
        let mp = MasterParams::new(1, 3).unwrap();
        let s = spec("-q^(1/2)", "q^(2/3)");
        let a = replay_proof(mp, &s, p(12)).unwrap();
        let b = replay_proof_with(mp, &s, p(12), ReplayOptions { scan_scale: 2, box_margin: 4 }).unwrap();
        assert!(all_verified(&a) && all_verified(&b));
    }
}
