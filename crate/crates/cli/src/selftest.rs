//! The acceptance suite: twelve criteria, each an exact check with a time
//! budget. Random inputs come from a seeded generator so runs are repeatable.

use std::fmt;
use std::time::{Duration, Instant};

use heckmort_core::appell::{lemma_expansion_a, lemma_expansion_b};
use heckmort_core::eulerian::{catalog_verify, pochhammer, Length, PochhammerSpec};
use heckmort_core::hecke::{f_abc, f_abc_with_slack, onepsi_corollary_lhs, onepsi_corollary_rhs, HeckeParams};
use heckmort_core::master::{lemma_sign_ids, replay_proof, verify_master, MasterParams, Specialization};
use heckmort_core::series::binom2;
use heckmort_core::theta::{theta_j, triple_product_check, ThetaSpec};
use heckmort_core::{Coefficient, Exponent, QSeries, SignedMonomial};
use rand::{seq::SliceRandom, Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ast::{Call, Equation, Expr, Node};
use crate::cache::Cache;
use crate::eval::evaluate;
use crate::parser::parse_expr;
use crate::verify::{reports_json, run_verify, EquationReport, RunConfig};

pub const DEFAULT_SEED: u64 = 0x5eed_2024;

#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub limit: Option<Duration>,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        let limit = self.limit.map(|l| format!(", limit {} s", l.as_secs())).unwrap_or_default();
        write!(
            f,
            "[{verdict}] criterion {:>2} {}: {} ({:.2} s{limit})",
            self.id,
            self.title,
            self.detail,
            self.elapsed.as_secs_f64()
        )
    }
}

pub const TITLES: [&str; 12] = [
    "triple product",
    "bilateral corollary",
    "master formula",
    "f0 mock theta conjecture",
    "Slater identity",
    "Andrews Hecke-type identity",
    "universal mock theta identity",
    "second Hecke-type identity and its Appell-Lerch form",
    "Appell-Lerch expansions",
    "sign identities",
    "proof replay",
    "property suites",
];

fn limit_of(id: u8) -> Option<Duration> {
    let secs = match id {
        1 => 5,
        2 | 5 | 9 => 10,
        3 | 11 => 120,
        4 | 6 | 7 => 30,
        8 => 120,
        10 => 5,
        _ => return None,
    };
    Some(Duration::from_secs(secs))
}

/// Runs one criterion; `passed` requires both exactness and the time budget.
pub fn run_criterion(id: u8, seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ u64::from(id));
    let start = Instant::now();
    let result = match id {
        1 => triple_product(&mut rng),
        2 => corollary(&mut rng),
        3 => master(),
        4 => catalog(&[("f0_conjecture", 150)]),
        5 => catalog(&[("slater_39", 200)]),
        6 => catalog(&[("andrews_1_14", 150)]),
        7 => catalog(&[("mortenson_g_neg_q", 150)]),
        8 => catalog_each(&[("andrews_4_25", 120), ("eq_1_5", 120)], Duration::from_secs(60)),
        9 => appell_expansions(&mut rng),
        10 => sign_identities(),
        11 => replay(),
        12 => properties(&mut rng),
        _ => Err(format!("no criterion {id}")),
    };
    let elapsed = start.elapsed();
    let limit = limit_of(id);
    let (mut passed, mut detail) = match result {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    if let Some(l) = limit {
        if passed && elapsed > l {
            passed = false;
            detail = format!("{detail}; over the time budget");
        }
    }
    let title = id.checked_sub(1).and_then(|i| TITLES.get(i as usize)).copied().unwrap_or("unknown");
    Outcome { id, title, passed, detail, elapsed, limit }
}

pub fn run_all(seed: u64) -> Vec<Outcome> {
    (1..=12).map(|id| run_criterion(id, seed)).collect()
}

type Check = Result<String, String>;

fn p(n: i64) -> Exponent {
    Exponent::int(n)
}

fn m(s: &str) -> SignedMonomial {
    s.parse().expect("literal monomial")
}

fn pick<T: Clone>(rng: &mut ChaCha8Rng, xs: &[T]) -> T {
    xs.choose(rng).expect("nonempty").clone()
}

fn rat(n: i64, d: i64) -> Coefficient {
    Coefficient::new(n.into(), d.into())
}

fn random_coeff(rng: &mut ChaCha8Rng) -> Coefficient {
    let (n, d) = pick(rng, &[(1, 1), (-1, 1), (2, 1), (-2, 1), (1, 2), (-1, 2), (3, 1), (2, 3), (-3, 2)]);
    rat(n, d)
}

/// A monomial `c q^e` with `lo < e < hi` and denominator at most 4.
fn random_mono_in(rng: &mut ChaCha8Rng, lo: Exponent, hi: Exponent) -> SignedMonomial {
    loop {
        let d = rng.gen_range(1..=4);
        let n = rng.gen_range(-12..=12);
        let e = Exponent::new(n, d);
        if lo < e && e < hi {
            return SignedMonomial::new(random_coeff(rng), e).expect("nonzero");
        }
    }
}

fn tally(label: &str, total: usize, failures: Vec<String>) -> Check {
    if failures.is_empty() {
        Ok(format!("{total}/{total} {label}"))
    } else {
        Err(format!("{}/{total} {label}; first failure: {}", total - failures.len(), failures[0]))
    }
}

fn triple_product(rng: &mut ChaCha8Rng) -> Check {
    let mut bad = Vec::new();
    for _ in 0..25 {
        let arg = random_mono_in(rng, p(-3), p(3));
        let base_c = pick(rng, &[rat(1, 1), rat(2, 1), rat(1, 2), rat(3, 1)]);
        let base_e = pick(rng, &[Exponent::ONE, Exponent::new(1, 2), p(2), Exponent::new(3, 2)]);
        let spec = ThetaSpec::new(arg, SignedMonomial::new(base_c, base_e).expect("nonzero")).expect("positive base");
        match triple_product_check(&spec, p(200)) {
            Ok(r) if r.is_verified() => {}
            Ok(r) => bad.push(format!("j({}; {}): {r}", spec.arg, spec.base)),
            Err(e) => bad.push(format!("j({}; {}): {e}", spec.arg, spec.base)),
        }
    }
    tally("sum = product mod q^200", 25, bad)
}

fn corollary(rng: &mut ChaCha8Rng) -> Check {
    let mut bad = Vec::new();
    for _ in 0..10 {
        let x = random_mono_in(rng, Exponent::ZERO, Exponent::ONE);
        let y = random_mono_in(rng, Exponent::ZERO, Exponent::ONE);
        let r = onepsi_corollary_lhs(&x, &y, p(100))
            .and_then(|l| onepsi_corollary_rhs(&x, &y, p(100)).map(|r| l.compare_to(&r, p(100))));
        match r {
            Ok(r) if r.is_verified() => {}
            Ok(r) => bad.push(format!("({x}, {y}): {r}")),
            Err(e) => bad.push(format!("({x}, {y}): {e}")),
        }
    }
    tally("pairs mod q^100", 10, bad)
}

/// Three generic specializations per parameter pair; for even `n` the
/// negatives `-x`, `-y` have positive coefficients.
pub fn master_cases() -> Vec<(i64, i64, SignedMonomial, SignedMonomial)> {
    let odd = [("q^(1/3)", "2*q^(1/2)"), ("-q^(1/5)", "q^(2/3)"), ("3/2*q^(1/4)", "-q^(3/4)")];
    let even = [("-q^(1/3)", "-2*q^(1/2)"), ("-1/2*q^(1/5)", "-q^(2/3)"), ("-3*q^(1/4)", "-q^(3/4)")];
    let mut out = Vec::new();
    for (n, pp) in [(1, 1), (1, 2), (2, 1), (1, 3), (3, 1), (2, 3), (3, 2)] {
        let specs = if n % 2 == 0 { &even } else { &odd };
        for (x, y) in specs {
            out.push((n, pp, m(x), m(y)));
        }
    }
    out
}

fn master() -> Check {
    let cases = master_cases();
    let mut bad = Vec::new();
    for (n, pp, x, y) in &cases {
        let mp = MasterParams::new(*n, *pp).map_err(|e| e.to_string())?;
        match verify_master(mp, &Specialization::new(x.clone(), y.clone()), p(60)) {
            Ok(r) if r.is_verified() => {}
            Ok(r) => bad.push(format!("(n,p)=({n},{pp}) at ({x}, {y}): {r}")),
            Err(e) => bad.push(format!("(n,p)=({n},{pp}) at ({x}, {y}): {e}")),
        }
    }
    tally("instances of f = g + θ mod q^60", cases.len(), bad)
}

fn catalog(entries: &[(&str, i64)]) -> Check {
    let mut parts = Vec::new();
    for (name, order) in entries {
        let r = catalog_verify(name, p(*order)).map_err(|e| format!("{name}: {e}"))?;
        if !r.is_verified() {
            return Err(format!("{name}: {r}"));
        }
        parts.push(format!("{name} verified mod q^{order}"));
    }
    Ok(parts.join(", "))
}

fn catalog_each(entries: &[(&str, i64)], each: Duration) -> Check {
    let mut parts = Vec::new();
    for e in entries {
        let t = Instant::now();
        let d = catalog(std::slice::from_ref(e))?;
        if t.elapsed() > each {
            return Err(format!("{d} but took {:.1} s", t.elapsed().as_secs_f64()));
        }
        parts.push(d);
    }
    Ok(parts.join(", "))
}

fn appell_expansions(rng: &mut ChaCha8Rng) -> Check {
    let mut bad = Vec::new();
    for window in [0, 1] {
        for _ in 0..10 {
            let x = if window == 0 {
                random_mono_in(rng, Exponent::ZERO, Exponent::ONE)
            } else {
                random_mono_in(rng, -Exponent::ONE, Exponent::ZERO)
            };
            let lhs = if window == 0 { lemma_expansion_a(&x, p(60)) } else { lemma_expansion_b(&x, p(60)) };
            let text = format!("Jbar(0,1) * AL({}; q^(1); -q^(0))", crate::ast::mono_text(&x));
            let rhs = evaluate(&parse_expr(&text).expect("well-formed"), p(60));
            match (lhs, rhs) {
                (Ok(l), Ok(r)) if l.compare_to(&r, p(60)).is_verified() => {}
                (Ok(l), Ok(r)) => bad.push(format!("{x}: {}", l.compare_to(&r, p(60)))),
                (Err(e), _) => bad.push(format!("{x}: {e}")),
                (_, Err(e)) => bad.push(format!("{x}: {e}")),
            }
        }
    }
    tally("monomials (10 per window) mod q^60", 20, bad)
}

fn sign_identities() -> Check {
    let mut cases = 0;
    let mut bad = Vec::new();
    for n in 1..=9 {
        let r = lemma_sign_ids(n, 10);
        cases += r.cases;
        if let Some(c) = r.first_counterexample {
            bad.push(format!(
                "n={n}: {} counterexamples, first identity {} at k={} r={} s={} w={} (lhs {}, rhs {})",
                r.counterexamples, c.identity, c.k, c.r, c.s, c.w, c.lhs, c.rhs
            ));
        }
    }
    if bad.is_empty() {
        Ok(format!("{cases} cases over n <= 9, no counterexample"))
    } else {
        Err(format!("{} of 9 values of n fail: {}", bad.len(), bad.join("; ")))
    }
}

fn replay() -> Check {
    let mut parts = Vec::new();
    for (n, pp, x, y) in [(1, 2, "q", "q"), (3, 2, "q", "2*q^(3/2)")] {
        let mp = MasterParams::new(n, pp).map_err(|e| e.to_string())?;
        let reports =
            replay_proof(mp, &Specialization::new(m(x), m(y)), p(30)).map_err(|e| format!("({n},{pp}): {e}"))?;
        if let Some(bad) = reports.iter().find(|r| !r.is_verified()) {
            return Err(format!("(n,p)=({n},{pp}) stage {}: {}", bad.stage, bad.report));
        }
        parts.push(format!("(n,p)=({n},{pp}) {} stages", reports.len()));
    }
    Ok(format!("{} verified mod q^30", parts.join(", ")))
}

// ---------------------------------------------------------------------------
// random generators shared with the property suites

pub fn random_series(rng: &mut ChaCha8Rng) -> QSeries {
    let precision = p(rng.gen_range(6..14));
    let terms: Vec<(Exponent, Coefficient)> = (0..rng.gen_range(0..8))
        .map(|_| {
            let e = Exponent::new(rng.gen_range(-4..12), rng.gen_range(1..3));
            (e, rat(rng.gen_range(-5..6), rng.gen_range(1..4)))
        })
        .collect();
    QSeries::from_terms(terms, precision)
}

fn random_unit(rng: &mut ChaCha8Rng) -> QSeries {
    let s = random_series(rng);
    let lead = rat(pick(rng, &[1, -1, 2, -3, 4]), pick(rng, &[1, 2, 3]));
    let rest =
        QSeries::from_terms(s.terms().filter(|(e, _)| e.is_positive()).map(|(e, c)| (*e, c.clone())), s.precision());
    let shift = SignedMonomial::q_pow(Exponent::new(rng.gen_range(-3..4), 2));
    (&rest + &QSeries::constant(lead, s.precision())).mul_monomial(&shift)
}

fn arb_mono(rng: &mut ChaCha8Rng) -> SignedMonomial {
    random_mono_in(rng, p(-3), p(3))
}

fn arb_small_int(rng: &mut ChaCha8Rng) -> i64 {
    rng.gen_range(-3..7)
}

/// A random expression tree; `cheap` restricts it to theta quotients and
/// literals so that evaluating it stays fast.
pub fn random_ast(rng: &mut ChaCha8Rng, depth: u32, cheap: bool) -> Node {
    let leaf = depth == 0 || rng.gen_bool(0.3);
    let e = if leaf {
        match rng.gen_range(0..3) {
            0 => {
                let d = pick(rng, &[1, 1, 2, 3]);
                Expr::Rational(rat(rng.gen_range(0..7), d))
            }
            1 => Expr::Mono(arb_mono(rng)),
            _ => Expr::Call(random_call(rng, cheap)),
        }
    } else {
        let sub = |rng: &mut ChaCha8Rng| Box::new(random_ast(rng, depth - 1, cheap));
        match rng.gen_range(0..7) {
            0 => Expr::Add(sub(rng), sub(rng)),
            1 => Expr::Sub(sub(rng), sub(rng)),
            2 => Expr::Mul(sub(rng), sub(rng)),
            3 => Expr::Div(sub(rng), Box::new(Node::bare(Expr::Call(random_call(rng, true))))),
            4 => Expr::Neg(sub(rng)),
            5 => Expr::Pow(sub(rng), rng.gen_range(-2..4)),
            _ => Expr::Call(random_call(rng, cheap)),
        }
    };
    Node::bare(e)
}

fn random_call(rng: &mut ChaCha8Rng, cheap: bool) -> Call {
    let positive = |rng: &mut ChaCha8Rng| {
        SignedMonomial::new(random_coeff(rng), Exponent::new(rng.gen_range(1..5), rng.gen_range(1..3)))
            .expect("nonzero")
    };
    let kinds = if cheap { 4 } else { 10 };
    match rng.gen_range(0..kinds) {
        0 => Call::J(rng.gen_range(1..4), rng.gen_range(4..8)),
        1 => Call::Jbar(rng.gen_range(0..4), rng.gen_range(1..6)),
        2 => Call::Jm(rng.gen_range(1..5)),
        3 => Call::Theta { arg: arb_mono(rng), base: positive(rng) },
        4 => Call::Appell { x: arb_mono(rng), base: positive(rng), z: arb_mono(rng) },
        5 => Call::F {
            a: arb_small_int(rng),
            b: arb_small_int(rng),
            c: arb_small_int(rng),
            x: arb_mono(rng),
            y: arb_mono(rng),
        },
        6 => Call::G {
            a: arb_small_int(rng),
            b: arb_small_int(rng),
            c: arb_small_int(rng),
            x: arb_mono(rng),
            y: arb_mono(rng),
        },
        7 => Call::ThetaNp { n: arb_small_int(rng), p: arb_small_int(rng), x: arb_mono(rng), y: arb_mono(rng) },
        8 => Call::GUniv { x: arb_mono(rng), base: positive(rng) },
        _ => Call::Builtin(pick(rng, &["f0_lhs", "slater39_lhs", "andrews114_lhs", "unknown_name"]).to_string()),
    }
}

// ---------------------------------------------------------------------------
// property suites

const CASES: usize = 100;

fn suite(name: &str, cases: usize, mut case: impl FnMut(usize) -> Result<(), String>) -> Result<String, String> {
    for i in 0..cases {
        case(i).map_err(|e| format!("{name} case {i}: {e}"))?;
    }
    Ok(format!("{name} {cases}"))
}

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn properties(rng: &mut ChaCha8Rng) -> Check {
    let mut done = Vec::new();
    done.push(suite("ring laws", CASES, |_| {
        let (a, b, c) = (random_series(rng), random_series(rng), random_series(rng));
        ensure((&(&a + &b) + &c).compare(&(&a + &(&b + &c))).is_verified(), || "associativity of +".into())?;
        ensure((&a * &b).compare(&(&b * &a)).is_verified(), || "commutativity of *".into())?;
        ensure((&(&a * &b) * &c).compare(&(&a * &(&b * &c))).is_verified(), || "associativity of *".into())?;
        ensure((&a * &(&b + &c)).compare(&(&(&a * &b) + &(&a * &c))).is_verified(), || "distributivity".into())
    })?);
    done.push(suite("inversion", CASES, |_| {
        let a = random_unit(rng);
        let inv = a.invert().map_err(|e| e.to_string())?;
        let prod = &a * &inv;
        ensure(prod.compare(&QSeries::one(prod.precision())).is_verified(), || format!("{a} times its inverse"))?;
        let b = random_series(rng);
        let quot = b.div(&a).map_err(|e| e.to_string())?;
        ensure((&quot * &a).compare(&b).is_verified(), || "quotient times divisor".into())
    })?);
    done.push(suite("pochhammer cocycle", CASES, |_| {
        let base = SignedMonomial::q_pow(pick(rng, &[Exponent::ONE, p(2), Exponent::new(1, 2)]));
        let arg = loop {
            let a = arb_mono(rng);
            if !a.is_one() && a.integral_power_of(&base).is_none() {
                break a;
            }
        };
        let (k, l) = (rng.gen_range(0..6u64), rng.gen_range(0..6u64));
        let poch = |a: &SignedMonomial, n: u64| {
            PochhammerSpec::new(a.clone(), base.clone(), Length::Finite(n)).and_then(|s| pochhammer(&s, p(20)))
        };
        let whole = poch(&arg, k + l).map_err(|e| e.to_string())?;
        let split = &poch(&arg, k).map_err(|e| e.to_string())?
            * &poch(&(&arg * &base.powi(k as i64)), l).map_err(|e| e.to_string())?;
        ensure(whole.compare(&split).is_verified(), || format!("({arg}; {base})_{{{k}+{l}}}"))
    })?);
    done.push(suite("theta symmetry and quasi-periodicity", CASES, |_| {
        let base = SignedMonomial::q_pow(pick(rng, &[Exponent::ONE, p(2), p(3), Exponent::new(1, 2)]));
        let x = arb_mono(rng);
        let j = |a: SignedMonomial| ThetaSpec::new(a, base.clone()).and_then(|s| theta_j(&s, p(30)));
        let jx = j(x.clone()).map_err(|e| e.to_string())?;
        let refl = j(&base * &x.recip()).map_err(|e| e.to_string())?;
        ensure(jx.compare(&refl).is_verified(), || format!("j({x}) = j(b/x)"))?;
        let inv = j(x.recip()).map_err(|e| e.to_string())?.mul_monomial(&-&x);
        ensure(jx.compare(&inv).is_verified(), || format!("j({x}) = -x j(1/x)"))?;
        // j(b^k x; b) = (-1)^k b^{-C(k,2)} x^{-k} j(x; b)
        let k = rng.gen_range(-3i64..4);
        let shifted = j(&base.powi(k) * &x).map_err(|e| e.to_string())?;
        let sign = if k % 2 == 0 { SignedMonomial::one() } else { -SignedMonomial::one() };
        let factor = &(&sign * &base.powi(-binom2(k))) * &x.powi(-k);
        ensure(shifted.compare(&jx.mul_monomial(&factor)).is_verified(), || format!("quasi-periodicity k={k} at {x}"))
    })?);
    let hecke = |rng: &mut ChaCha8Rng| loop {
        let (a, b, c) = (rng.gen_range(1..4), rng.gen_range(1..5), rng.gen_range(1..4));
        if b * b > a * c {
            return HeckeParams::new(a, b, c).expect("positive");
        }
    };
    let hecke_arg = |rng: &mut ChaCha8Rng| random_mono_in(rng, p(-2), p(2));
    done.push(suite("enumeration-bound doubling", CASES, |_| {
        let (h, x, y) = (hecke(rng), hecke_arg(rng), hecke_arg(rng));
        let tight = f_abc(h, &x, &y, p(20)).map_err(|e| e.to_string())?;
        let wide = f_abc_with_slack(h, &x, &y, p(20), p(20)).map_err(|e| e.to_string())?;
        ensure(tight == wide, || format!("f_{{{},{},{}}}({x}, {y})", h.a, h.b, h.c))
    })?);
    done.push(suite("f symmetry", CASES, |_| {
        let (h, x, y) = (hecke(rng), hecke_arg(rng), hecke_arg(rng));
        let swapped = HeckeParams::new(h.c, h.b, h.a).expect("positive");
        let l = f_abc(h, &x, &y, p(20)).map_err(|e| e.to_string())?;
        let r = f_abc(swapped, &y, &x, p(20)).map_err(|e| e.to_string())?;
        ensure(l == r, || format!("f_{{{},{},{}}}({x}, {y})", h.a, h.b, h.c))
    })?);
    done.push(suite("parser round trip", 2 * CASES, |_| {
        let ast = random_ast(rng, 4, false);
        let text = ast.to_string();
        let back = parse_expr(&text).map_err(|e| format!("`{text}`: {e}"))?;
        ensure(back == ast, || format!("`{text}` reparsed as `{back}`"))
    })?);
    done.push(cache_determinism(rng)?);
    Ok(done.join(", "))
}

fn cache_determinism(rng: &mut ChaCha8Rng) -> Check {
    let eqs: Vec<Equation> = (0..CASES)
        .map(|i| {
            let lhs = random_ast(rng, 2, true);
            // half true by construction, half almost surely false
            let rhs = if i % 2 == 0 { lhs.clone() } else { random_ast(rng, 2, true) };
            Equation { label: Some(format!("random{i}")), lhs, rhs, line: i + 1 }
        })
        .collect();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut cfg = RunConfig::new(p(12)).map_err(|e| e.to_string())?;
    cfg.cache = Some(Cache::new(dir.path()));
    cfg.jobs = 4;
    let strip =
        |v: Vec<EquationReport>| reports_json(&v.iter().map(EquationReport::without_timing).collect::<Vec<_>>());
    let cold = strip(run_verify(&eqs, &cfg));
    let warm = strip(run_verify(&eqs, &cfg));
    cfg.jobs = 1;
    let serial = strip(run_verify(&eqs, &cfg));
    cfg.cache = None;
    let uncached = strip(run_verify(&eqs, &cfg));
    if cold != warm {
        return Err("cache determinism: warm-cache reports differ from cold".into());
    }
    if cold != serial || cold != uncached {
        return Err("cache determinism: reports depend on width or caching".into());
    }
    Ok(format!("cache determinism {CASES}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_trees_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let ast = random_ast(&mut rng, 5, false);
            let text = ast.to_string();
            assert_eq!(parse_expr(&text).unwrap(), ast, "{text}");
        }
    }

    #[test]
    fn outcome_line_format() {
        let o = Outcome {
            id: 3,
            title: "master formula",
            passed: true,
            detail: "21/21".into(),
            elapsed: Duration::from_millis(1500),
            limit: Some(Duration::from_secs(120)),
        };
        assert_eq!(o.to_string(), "[PASS] criterion  3 master formula: 21/21 (1.50 s, limit 120 s)");
    }

    #[test]
    fn unknown_criterion_fails() {
        assert!(!run_criterion(13, 0).passed);
    }

    #[test]
    fn master_cases_cover_every_pair() {
        let cases = master_cases();
        assert_eq!(cases.len(), 21);
        for (n, _, x, y) in cases {
            if n % 2 == 0 {
                assert!((-&x).coeff() > &Coefficient::from_integer(0.into()));
                assert!((-&y).coeff() > &Coefficient::from_integer(0.into()));
            }
        }
    }
}
