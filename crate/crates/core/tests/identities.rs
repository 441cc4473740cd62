use heckmort_core::appell::{appell_m, lemma_expansion_a, AppellSpec};
use heckmort_core::eulerian::{catalog, g_universal};
use heckmort_core::hecke::{f_abc, HeckeParams};
use heckmort_core::master::{g_abc, replay_proof, theta_np, verify_master, MasterParams, Specialization};
use heckmort_core::series::from_int_coeffs;
use heckmort_core::theta::{big_j, theta_j, triple_product_check, JVariant, ThetaSpec};
use heckmort_core::{Exponent, QError, SignedMonomial};

fn m(s: &str) -> SignedMonomial {
    s.parse().unwrap()
}

fn p(n: i64) -> Exponent {
    Exponent::int(n)
}

#[test]
fn catalog_holds_at_moderate_order() {
    for entry in catalog() {
        let lhs = (entry.lhs)(p(80)).unwrap();
        let rhs = (entry.rhs)(p(80)).unwrap();
        let r = lhs.compare_to(&rhs, p(80));
        assert!(r.is_verified(), "{}: {r}", entry.name);
    }
}

#[test]
fn master_formula_small_instances() {
    let cases = [
        (1, 1, "q^(1/3)", "2*q^(1/2)"),
        (1, 2, "q", "q"),
        (2, 1, "-q^(1/3)", "-2*q^(1/2)"),
        (3, 2, "q^(1/3)", "2*q^(1/2)"),
    ];
    for (n, pp, x, y) in cases {
        let r = verify_master(MasterParams::new(n, pp).unwrap(), &Specialization::new(m(x), m(y)), p(30)).unwrap();
        assert!(r.is_verified(), "({n},{pp}): {r}");
    }
}

#[test]
fn master_formula_parts_are_consistent() {
    // f = g + θ assembled by hand from the public pieces
    let mp = MasterParams::new(1, 2).unwrap();
    let (x, y) = (m("q^(1/3)"), m("-q^(1/4)"));
    let f = f_abc(mp.hecke(), &x, &y, p(25)).unwrap();
    let g = g_abc(1, 3, 1, &x, &y, p(25)).unwrap();
    let theta = theta_np(mp, &Specialization::new(x, y), p(25)).unwrap();
    assert!(f.compare_to(&(&g + &theta), p(25)).is_verified());
}

#[test]
fn replay_runs_end_to_end() {
    let reports = replay_proof(MasterParams::new(1, 2).unwrap(), &Specialization::new(m("q"), m("q")), p(15)).unwrap();
    assert!(reports.iter().all(|r| r.is_verified()));
    assert_eq!(reports.first().unwrap().stage, "rh1");
    assert_eq!(reports.last().unwrap().stage, "total");
}

#[test]
fn euler_function_is_pentagonal() {
    let j1 = big_j(0, 1, JVariant::Eta, p(16)).unwrap();
    let expected = from_int_coeffs(&[1, -1, -1, 0, 0, 1, 0, 1, 0, 0, 0, 0, -1, 0, 0, -1], p(16));
    assert_eq!(j1, expected);
}

#[test]
fn triple_product_with_rational_base() {
    let spec = ThetaSpec::new(m("-2/3*q^(1/2)"), m("3*q^(3/2)")).unwrap();
    assert!(triple_product_check(&spec, p(40)).unwrap().is_verified());
}

#[test]
fn universal_g_against_appell_form() {
    // g(x,q) = -x^{-1} m(q^2 x^{-3}, q^3, x^2) - x^{-2} m(q x^{-3}, q^3, x^2)
    let x = m("q^(1/3)");
    let at = |arg: SignedMonomial| appell_m(&AppellSpec::new(arg, m("q^3"), x.powi(2)).unwrap(), p(30)).unwrap();
    let first = at(&m("q^2") * &x.powi(-3)).mul_monomial(&-&x.recip());
    let second = at(&m("q") * &x.powi(-3)).mul_monomial(&-&x.powi(-2));
    let g = g_universal(&x, &m("q"), p(28)).unwrap();
    assert!(g.compare_to(&(&first + &second), p(28)).is_verified());
}

#[test]
fn appell_expansion_agrees_with_definition() {
    let x = m("-3*q^(2/5)");
    let lhs = lemma_expansion_a(&x, p(30)).unwrap();
    let jbar = big_j(0, 1, JVariant::Bar, p(40)).unwrap();
    let rhs = &jbar * &appell_m(&AppellSpec::at_minus_one(x, m("q")).unwrap(), p(40)).unwrap();
    assert!(lhs.compare_to(&rhs, p(30)).is_verified());
}

#[test]
fn errors_surface_through_the_public_api() {
    assert!(matches!(HeckeParams::new(0, 2, 1), Err(QError::InvalidParams(_))));
    assert!(matches!(AppellSpec::new(m("q"), m("q"), m("q^2")), Err(QError::PoleAtSpecialization(_))));
    let vanishing = theta_j(&ThetaSpec::new(m("q^2"), m("q")).unwrap(), p(10)).unwrap();
    assert!(vanishing.is_empty());
    let r = verify_master(MasterParams::new(1, 1).unwrap(), &Specialization::new(m("-q^2"), m("q^2")), p(10));
    assert!(matches!(r, Err(QError::NonGenericSpecialization(_))));
}
