//! Enumeration of multi-index sums `Σ weight(i) (-x)^{a(i)} (-y)^{b(i)} q^{Q(i)}`
//! whose index set is a union of polyhedral cells and whose q-exponent is a
//! quadratic polynomial in the indices.
//!
//! The innermost index is scanned exactly: the exponent is a convex parabola
//! in it, so walking outward from the vertex in each direction stops at the
//! first term at or past the horizon. Outer indices are scanned outward from
//! a center (the continuous minimizer when the remaining form is positive
//! definite, otherwise the cell boundary nearest 0) and stop after a run of
//! empty slices. The run lengths are [`Limits`]; tests double them to check
//! nothing is missed.

#[cfg(test)]
use num_traits::Zero;

use crate::error::{QError, Result};
#[cfg(test)]
use crate::series::QSeries;
use crate::series::{pow_rational, Coefficient, Exponent, SignedMonomial};

/// `coef · i + konst`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Affine {
    pub coef: Vec<i64>,
    pub konst: i64,
}

impl Affine {
    pub fn new(coef: Vec<i64>, konst: i64) -> Self {
        Affine { coef, konst }
    }

    #[cfg(test)]
    pub fn eval(&self, i: &[i64]) -> i64 {
        self.coef.iter().zip(i).map(|(c, x)| c * x).sum::<i64>() + self.konst
    }

    /// `-self - 1`, so that `self < 0` becomes `result >= 0`.
    pub fn negative_side(&self) -> Self {
        Affine { coef: self.coef.iter().map(|c| -c).collect(), konst: -self.konst - 1 }
    }

    fn last_index(&self) -> Option<usize> {
        self.coef.iter().rposition(|c| *c != 0)
    }
}

/// Points where every constraint is `>= 0`, carrying `weight`.
#[derive(Debug, Clone)]
pub(crate) struct Cell {
    pub constraints: Vec<Affine>,
    pub weight: Coefficient,
}

/// The two nonzero cells of `sg(a, b)`, intersected with `extra`.
pub(crate) fn sign_pair_cells(a: &Affine, b: &Affine, extra: &[Affine]) -> Vec<Cell> {
    let mut pos = vec![a.clone(), b.clone()];
    pos.extend_from_slice(extra);
    let mut neg = vec![a.negative_side(), b.negative_side()];
    neg.extend_from_slice(extra);
    vec![
        Cell { constraints: pos, weight: Coefficient::from_integer(1.into()) },
        Cell { constraints: neg, weight: Coefficient::from_integer((-1).into()) },
    ]
}

#[cfg(test)]
/// The two cells of `c · sg(a)`.
pub(crate) fn sign_cells(a: &Affine, c: Coefficient, extra: &[Affine]) -> Vec<Cell> {
    let mut pos = vec![a.clone()];
    pos.extend_from_slice(extra);
    let mut neg = vec![a.negative_side()];
    neg.extend_from_slice(extra);
    vec![Cell { constraints: pos, weight: c.clone() }, Cell { constraints: neg, weight: -c }]
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Limits {
    /// Empty outer slices tolerated before the first hit.
    pub seek: i64,
    /// Empty outer slices tolerated after a hit.
    pub patience: i64,
    /// Total slice evaluations before giving up.
    pub max_visits: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { seek: 24, patience: 4, max_visits: 40_000_000 }
    }
}

impl Limits {
    pub fn doubled(self) -> Self {
        Limits { seek: 2 * self.seek, patience: 2 * self.patience, max_visits: 2 * self.max_visits }
    }
}

pub(crate) type QPart<'a> = Box<dyn Fn(&[i64]) -> Exponent + 'a>;
pub(crate) type Powers<'a> = Box<dyn Fn(&[i64]) -> (i64, i64) + 'a>;

pub(crate) struct LatticeSum<'a> {
    pub dim: usize,
    pub cells: Vec<Cell>,
    /// The q-exponent apart from the `(-x)`, `(-y)` contributions.
    pub q_part: QPart<'a>,
    /// Powers of `-x` and `-y`.
    pub powers: Powers<'a>,
}

/// One enumerated term.
#[derive(Debug, Clone)]
pub(crate) struct Term {
    pub index: Vec<i64>,
    pub exp: Exponent,
    pub coeff: Coefficient,
}

/// `E(i) = ½ iᵀ H i + gᵀ i + c`, recovered from samples of the exponent.
struct Quadratic {
    h: Vec<Vec<Exponent>>,
    g: Vec<Exponent>,
}

impl Quadratic {
    fn from_fn(dim: usize, f: &dyn Fn(&[i64]) -> Exponent) -> Result<Self> {
        let e = |j: usize, k: usize, mj: i64, mk: i64| {
            let mut v = vec![0i64; dim];
            v[j] += mj;
            v[k] += mk;
            f(&v)
        };
        let zero = vec![0i64; dim];
        let c = f(&zero);
        let mut h = vec![vec![Exponent::ZERO; dim]; dim];
        let mut g = vec![Exponent::ZERO; dim];
        for j in 0..dim {
            let plus = e(j, j, 1, 0);
            let minus = e(j, j, -1, 0);
            h[j][j] = plus + minus - c * 2;
            g[j] = (plus - minus) / 2;
        }
        for j in 0..dim {
            for k in j + 1..dim {
                let both = e(j, k, 1, 1);
                let v = both - c - g[j] - g[k] - (h[j][j] + h[k][k]) / 2;
                h[j][k] = v;
                h[k][j] = v;
            }
        }
        let quad = Quadratic { h, g };
        // spot-check that the exponent really is quadratic
        for probe in [[3i64, -2, 5, -7, 1], [-4, 6, -1, 2, -3]] {
            let v: Vec<i64> = probe.iter().copied().take(dim).chain(std::iter::repeat(1)).take(dim).collect();
            if quad.eval(&v, c) != f(&v) {
                return Err(QError::InvalidParams("multi-sum exponent is not quadratic".into()));
            }
        }
        Ok(quad)
    }

    fn eval(&self, v: &[i64], c: Exponent) -> Exponent {
        let mut total = c;
        for (j, vj) in v.iter().enumerate() {
            total += self.g[j] * *vj;
            for (k, vk) in v.iter().enumerate() {
                total += self.h[j][k] * (vj * vk) / 2;
            }
        }
        total
    }

    /// Continuous minimizer of the form in indices `level..` with the prefix
    /// fixed, if that restriction is positive definite.
    fn center(&self, prefix: &[i64], level: usize) -> Option<Exponent> {
        let dim = self.g.len();
        let m = dim - level;
        // H_zz z = -(g_z + H_zp p), solved by Gaussian elimination; positive
        // definiteness is read off the pivots.
        let mut a: Vec<Vec<Exponent>> =
            (0..m).map(|i| (0..m).map(|j| self.h[level + i][level + j]).collect()).collect();
        let mut rhs: Vec<Exponent> = (0..m)
            .map(|i| {
                let row = level + i;
                let mut v = self.g[row];
                for (k, pk) in prefix.iter().enumerate() {
                    v += self.h[row][k] * *pk;
                }
                -v
            })
            .collect();
        for col in 0..m {
            let pivot = a[col][col];
            if !pivot.is_positive() {
                return None;
            }
            for row in col + 1..m {
                let factor = a[row][col] / pivot;
                #[allow(clippy::needless_range_loop)]
                for k in col..m {
                    let delta = factor * a[col][k];
                    a[row][k] -= delta;
                }
                let delta = factor * rhs[col];
                rhs[row] -= delta;
            }
        }
        let mut z = vec![Exponent::ZERO; m];
        for row in (0..m).rev() {
            let mut v = rhs[row];
            for k in row + 1..m {
                v -= a[row][k] * z[k];
            }
            z[row] = v / a[row][row];
        }
        Some(z[0])
    }
}

struct Walker<'s, 'a> {
    sum: &'s LatticeSum<'a>,
    cell: &'s Cell,
    quad: Quadratic,
    x: &'s SignedMonomial,
    y: &'s SignedMonomial,
    neg_x: Coefficient,
    neg_y: Coefficient,
    precision: Exponent,
    limits: Limits,
    visits: u64,
    out: Vec<Term>,
}

impl Walker<'_, '_> {
    fn exponent(&self, i: &[i64]) -> Exponent {
        let (a, b) = (self.sum.powers)(i);
        (self.sum.q_part)(i) + self.x.exp() * a + self.y.exp() * b
    }

    fn emit(&mut self, i: &[i64], exp: Exponent) {
        let (a, b) = (self.sum.powers)(i);
        let coeff = &self.cell.weight * pow_rational(&self.neg_x, a) * pow_rational(&self.neg_y, b);
        self.out.push(Term { index: i.to_vec(), exp, coeff });
    }

    /// Bounds on index `level` implied by constraints whose last variable it is.
    fn interval(&self, prefix: &[i64], level: usize) -> (Option<i64>, Option<i64>) {
        let mut lo: Option<i64> = None;
        let mut hi: Option<i64> = None;
        for c in &self.cell.constraints {
            if c.last_index() != Some(level) {
                continue;
            }
            let rest: i64 = c.coef.iter().zip(prefix).map(|(a, b)| a * b).sum::<i64>() + c.konst;
            let a = c.coef[level];
            if a > 0 {
                let bound = (-rest).div_euclid(a) + i64::from((-rest).rem_euclid(a) != 0);
                lo = Some(lo.map_or(bound, |l| l.max(bound)));
            } else {
                let bound = rest.div_euclid(-a);
                hi = Some(hi.map_or(bound, |h| h.min(bound)));
            }
        }
        (lo, hi)
    }

    fn tick(&mut self) -> Result<()> {
        self.visits += 1;
        if self.visits > self.limits.max_visits {
            return Err(QError::NonterminatingEnumeration(format!(
                "multi-sum did not close after {} slices",
                self.limits.max_visits
            )));
        }
        Ok(())
    }

    /// Enumerates the slice with `prefix` fixed; returns whether any term
    /// below the horizon was found.
    fn walk(&mut self, prefix: &mut Vec<i64>) -> Result<bool> {
        self.tick()?;
        let level = prefix.len();
        let (lo, hi) = self.interval(prefix, level);
        if let (Some(l), Some(h)) = (lo, hi) {
            if l > h {
                return Ok(false);
            }
        }
        if level + 1 == self.sum.dim {
            return self.walk_last(prefix, lo, hi);
        }
        let clamp = |v: i64| {
            let v = lo.map_or(v, |l| v.max(l));
            hi.map_or(v, |h| v.min(h))
        };
        let center = clamp(match self.quad.center(prefix, level) {
            Some(z) => z.floor(),
            None => 0,
        });
        let mut found = false;
        for dir in [1i64, -1] {
            let mut i = if dir == 1 { center } else { center - 1 };
            let mut misses = 0;
            let mut hit = false;
            loop {
                if lo.is_some_and(|l| i < l) || hi.is_some_and(|h| i > h) {
                    break;
                }
                prefix.push(i);
                let any = self.walk(prefix)?;
                prefix.pop();
                if any {
                    hit = true;
                    misses = 0;
                } else {
                    misses += 1;
                    let allowed = if hit { self.limits.patience } else { self.limits.seek };
                    // bounded intervals are scanned in full
                    if misses >= allowed && (lo.is_none() || hi.is_none()) {
                        break;
                    }
                }
                i += dir;
            }
            found |= hit;
        }
        Ok(found)
    }

    fn walk_last(&mut self, prefix: &[i64], lo: Option<i64>, hi: Option<i64>) -> Result<bool> {
        let level = prefix.len();
        let mut probe = prefix.to_vec();
        probe.push(0);
        let e0 = self.exponent(&probe);
        probe[level] = 1;
        let e1 = self.exponent(&probe);
        probe[level] = -1;
        let em = self.exponent(&probe);
        // E(i) = A i² + B i + e0
        let a = (e1 + em - e0 * 2) / 2;
        let b = (e1 - em) / 2;
        let mut found = false;
        let mut scan = |this: &mut Self, start: i64, dir: i64, found: &mut bool| -> Result<()> {
            let mut i = start;
            loop {
                if lo.is_some_and(|l| i < l) || hi.is_some_and(|h| i > h) {
                    return Ok(());
                }
                probe[level] = i;
                let e = this.exponent(&probe);
                if e >= this.precision {
                    return Ok(());
                }
                this.tick()?;
                this.emit(&probe, e);
                *found = true;
                i += dir;
            }
        };
        if a.is_positive() {
            let fl = (-b / (a * 2)).floor();
            let up = lo.map_or(fl + 1, |l| l.max(fl + 1));
            let down = hi.map_or(fl, |h| h.min(fl));
            scan(self, up, 1, &mut found)?;
            scan(self, down, -1, &mut found)?;
        } else if a.is_zero() && b.is_positive() && lo.is_some() {
            scan(self, lo.unwrap_or_default(), 1, &mut found)?;
        } else if a.is_zero() && b.is_negative() && hi.is_some() {
            scan(self, hi.unwrap_or_default(), -1, &mut found)?;
        } else if a.is_zero() && b.is_zero() && (e0 >= self.precision || (lo.is_some() && hi.is_some())) {
            if let (Some(l), Some(_)) = (lo, hi) {
                if e0 < self.precision {
                    scan(self, l, 1, &mut found)?;
                }
            }
        } else {
            return Err(QError::NonterminatingEnumeration(format!(
                "innermost index {level} is not bounded below the horizon"
            )));
        }
        Ok(found)
    }
}

impl LatticeSum<'_> {
    /// All terms below `precision`, over every cell.
    pub fn terms(
        &self,
        x: &SignedMonomial,
        y: &SignedMonomial,
        precision: Exponent,
        limits: Limits,
    ) -> Result<Vec<Term>> {
        let exponent = |i: &[i64]| {
            let (a, b) = (self.powers)(i);
            (self.q_part)(i) + x.exp() * a + y.exp() * b
        };
        let mut out = Vec::new();
        let mut visits = 0;
        for cell in &self.cells {
            let quad = Quadratic::from_fn(self.dim, &exponent)?;
            let mut walker = Walker {
                sum: self,
                cell,
                quad,
                x,
                y,
                neg_x: -x.coeff().clone(),
                neg_y: -y.coeff().clone(),
                precision,
                limits: Limits { max_visits: limits.max_visits.saturating_sub(visits), ..limits },
                visits: 0,
                out: Vec::new(),
            };
            walker.walk(&mut Vec::new())?;
            visits += walker.visits;
            out.append(&mut walker.out);
        }
        Ok(out)
    }

    #[cfg(test)]
    pub fn series(
        &self,
        x: &SignedMonomial,
        y: &SignedMonomial,
        precision: Exponent,
        limits: Limits,
    ) -> Result<QSeries> {
        let terms = self.terms(x, y, precision, limits)?;
        Ok(QSeries::from_terms(terms.into_iter().map(|t| (t.exp, t.coeff)), precision))
    }

    #[cfg(test)]
    /// The weighted term at a single point, if it lies in some cell.
    pub fn term_at(&self, i: &[i64], x: &SignedMonomial, y: &SignedMonomial) -> Option<(Exponent, Coefficient)> {
        let mut weight = Coefficient::zero();
        for cell in &self.cells {
            if cell.constraints.iter().all(|c| c.eval(i) >= 0) {
                weight += &cell.weight;
            }
        }
        if weight.is_zero() {
            return None;
        }
        let (a, b) = (self.powers)(i);
        let exp = (self.q_part)(i) + x.exp() * a + y.exp() * b;
        let coeff = weight * pow_rational(&-x.coeff().clone(), a) * pow_rational(&-y.coeff().clone(), b);
        Some((exp, coeff))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hecke::{f_abc, HeckeParams};
    use crate::series::{binom2, coeff};

    fn p(n: i64) -> Exponent {
        Exponent::int(n)
    }

    fn var(dim: usize, j: usize, konst: i64) -> Affine {
        let mut coef = vec![0; dim];
        coef[j] = 1;
        Affine::new(coef, konst)
    }

    fn hecke_as_lattice(h: HeckeParams) -> LatticeSum<'static> {
        LatticeSum {
            dim: 2,
            cells: sign_pair_cells(&var(2, 0, 0), &var(2, 1, 0), &[]),
            q_part: Box::new(move |i| Exponent::int(h.a * binom2(i[0]) + h.b * i[0] * i[1] + h.c * binom2(i[1]))),
            powers: Box::new(|i| (i[0], i[1])),
        }
    }

    #[test]
    fn reproduces_hecke_sums() {
        let h = HeckeParams::new(1, 2, 1).unwrap();
        let (x, y) = ("q".parse().unwrap(), "-2*q^(1/2)".parse().unwrap());
        let s = hecke_as_lattice(h).series(&x, &y, p(25), Limits::default()).unwrap();
        assert_eq!(s, f_abc(h, &x, &y, p(25)).unwrap());
    }

    #[test]
    fn indefinite_sum_without_sign_cells_does_not_close() {
        let sum = LatticeSum {
            dim: 2,
            cells: vec![Cell { constraints: vec![], weight: coeff(1) }],
            q_part: Box::new(|i| Exponent::int(binom2(i[0]) + 3 * i[0] * i[1] + binom2(i[1]))),
            powers: Box::new(|_| (0, 0)),
        };
        let one = SignedMonomial::one();
        let limits = Limits { max_visits: 100_000, ..Limits::default() };
        assert!(matches!(sum.terms(&one, &one, p(10), limits), Err(QError::NonterminatingEnumeration(_))));
    }

    #[test]
    fn intervals_from_constraints() {
        // 0 <= i0 <= 2, i1 >= 2 i0 - 1, q^{i1²}: a finite theta-like slab
        let cells = vec![Cell {
            constraints: vec![var(2, 0, 0), Affine::new(vec![-1, 0], 2), Affine::new(vec![-2, 1], 1)],
            weight: coeff(1),
        }];
        let sum = LatticeSum {
            dim: 2,
            cells,
            q_part: Box::new(|i| Exponent::int(i[1] * i[1])),
            powers: Box::new(|_| (0, 0)),
        };
        let one = SignedMonomial::one();
        let terms = sum.terms(&one, &one, p(10), Limits::default()).unwrap();
        let mut brute = 0;
        for i0 in 0..=2i64 {
            for i1 in -10i64..=10 {
                if i1 >= 2 * i0 - 1 && i1 * i1 < 10 {
                    brute += 1;
                }
            }
        }
        assert_eq!(terms.len(), brute);
    }

    #[test]
    fn term_at_sums_overlapping_cells() {
        let a = var(1, 0, 0);
        let cells = sign_cells(&a, coeff(1), &[]);
        let sum = LatticeSum {
            dim: 1,
            cells,
            q_part: Box::new(|i| Exponent::int(i[0] * i[0])),
            powers: Box::new(|_| (0, 0)),
        };
        let one = SignedMonomial::one();
        assert_eq!(sum.term_at(&[3], &one, &one), Some((p(9), coeff(1))));
        assert_eq!(sum.term_at(&[-3], &one, &one), Some((p(9), coeff(-1))));
    }
}
