use super::*;
use crate::level1::{delta, dim_cusp};
use crate::brackets::bracket_theta_dilated;

const PREC: u32 = 160;

fn f(prec: u32, v: f64) -> Float {
    Float::with_val(prec, v)
}

fn theta_form(trunc: u64) -> PlusForm {
    PlusForm::new(0, Expansion::Exact(theta(trunc)), "theta").unwrap()
}

fn rel(a: &BigComplex, b: &BigComplex) -> f64 {
    a.sub_ref(b).abs_f64() / b.abs_f64()
}

#[test]
fn theta_coefficients() {
    let t = theta(30);
    for n in 0..=30u64 {
        let r = (n as f64).sqrt() as u64;
        let expect = if n == 0 { 1 } else if r * r == n { 2 } else { 0 };
        assert_eq!(t.coeff(n).unwrap(), expect, "n = {n}");
    }
}

#[test]
fn theta_is_fixed_by_u4() {
    let t = theta(400);
    assert_eq!(u4(&t), theta(100));
}

#[test]
fn plus_condition() {
    assert!(plus_check(&theta_form(50)));
    let bad = ExactQSeries::from_terms(1, 10, [(1, Rational::from(1)), (6, Rational::from(3))]);
    assert_eq!(
        PlusForm::new(12, Expansion::Exact(bad.clone()), "x").unwrap_err().to_string(),
        Error::PlusConditionViolated { index: 6 }.to_string()
    );
    // Odd lam moves the forbidden residues to 1 and 2 mod 4.
    let odd = ExactQSeries::from_terms(1, 10, [(3, Rational::from(1)), (4, Rational::from(1))]);
    assert!(PlusForm::new(13, Expansion::Exact(odd.clone()), "x").is_ok());
    assert!(PlusForm::new(12, Expansion::Exact(odd), "x").is_err());
}

#[test]
fn float_plus_condition_tolerates_noise() {
    let s = ExactQSeries::from_terms(1, 10, [(1, Rational::from(1))]);
    let mut fl = FloatQSeries::from_exact(&s, 64).with_extra_err(1e-10);
    let noise = FloatQSeries::from_exact(&ExactQSeries::monomial(1, 10, 2, Rational::from((1, 1u64 << 40))), 64);
    fl = fl.add(&noise).unwrap();
    assert!(PlusForm::new(12, Expansion::Float(fl.clone()), "x").is_ok());
    let big = FloatQSeries::from_exact(&ExactQSeries::monomial(1, 10, 2, Rational::from((1, 100))), 64);
    assert!(PlusForm::new(12, Expansion::Float(fl.add(&big).unwrap()), "x").is_err());
}

#[test]
fn case_expansions_of_theta() {
    let [c1, c2, c3] = cusp_expansions(&theta_form(64), PREC).unwrap();
    assert_eq!(c1.series.trunc(), 16);
    assert_eq!(c1.series.coeff(4).unwrap().abs_f64(), 2.0);
    // Only odd squares survive at the cusp 1/2.
    let idx2: Vec<u64> = c2.series.terms().map(|(n, _)| n).collect();
    assert_eq!(idx2, vec![1, 9, 25, 49]);
    assert_eq!(c2.series.width(), 4);
    // (-i)^n twist: coefficient of q^(9/4) is 2 (-i)^9 = -2i.
    let c = c3.series.coeff(9).unwrap();
    assert!(c.re.is_zero() && c.im == -2);
    assert_eq!(c3.prefactor, Prefactor { sqrt2_exp: -1, zeta8_exp: 1 });
    assert_eq!(c3.prefactor.modulus_sqr(), Rational::from((1, 2)));
}

/// `|G|rho (tau)| = |c tau + d|^-kappa |G(rho tau)|` with `G = g|U4`.
fn check_modulus(g: &PlusForm, c: i32, case: usize, x: f64, y: f64) {
    let exps = cusp_expansions(g, PREC).unwrap();
    let kappa = g.lam as f64 + 0.5;
    let (x, y) = (f(PREC, x), f(PREC, y));
    let tau = BigComplex::from_parts(x.clone(), y.clone());
    // rho = (1 0; c 1): rho tau = tau / (c tau + 1)
    let j = tau.mul_float(&f(PREC, c as f64)).add_ref(&BigComplex::one(PREC));
    let rt = tau.div_ref(&j);
    let at_infinity = exps[0].eval(&rt.re, &rt.im);
    let lhs = exps[case].eval(&x, &y).abs_f64();
    let rhs = at_infinity.abs_f64() * j.abs_f64().powf(-kappa);
    assert!((lhs - rhs).abs() <= 1e-12 * rhs, "case {case}: {lhs} vs {rhs}");
}

#[test]
fn case_moduli_match_direct_evaluation() {
    let th = theta_form(1600);
    check_modulus(&th, -2, 1, 0.25, 1.0);
    check_modulus(&th, -1, 2, 0.25, 1.0);
    let g = bracket_theta_dilated(&delta(100), 12, 0).unwrap();
    check_modulus(&g, -2, 1, 0.3, 1.1);
    check_modulus(&g, -1, 2, 0.2, 0.9);
}

/// Evaluates `g|U4` and `g|W4` at a point and returns their ratio.
fn u4_over_w4(g: &PlusForm, x: f64, y: f64) -> BigComplex {
    let fl = g.to_float(PREC);
    let [c1, _, _] = cusp_expansions(g, PREC).unwrap();
    let (x, y) = (f(PREC, x), f(PREC, y));
    c1.eval(&x, &y).div_ref(&eval_w4(&fl, g.lam, &x, &y))
}

#[test]
fn theta_plus_relation() {
    let r = u4_over_w4(&theta_form(2000), 0.1, 0.7);
    assert!(rel(&r, &BigComplex::one(PREC)) < 1e-20);
}

#[test]
fn plus_relation_constant_is_two_to_lam() {
    let g = bracket_theta_dilated(&delta(120), 12, 0).unwrap();
    let expect = BigComplex::from_rational(PREC, &plus_relation_constant(12));
    assert_eq!(plus_relation_constant(12), 4096);
    for (x, y) in [(0.1, 0.7), (-0.2, 0.8)] {
        let r = u4_over_w4(&g, x, y);
        assert!(rel(&r, &expect) < 1e-12, "ratio {:?}", r.re.to_f64());
        // 2^(lam + 1/2) misses by a factor sqrt(2).
        assert!((r.abs_f64() / (2f64.powf(12.5)) - 0.5f64.sqrt()).abs() < 1e-10);
    }
    assert_eq!(plus_relation_constant(14), -16384);
}

#[test]
fn span_rank_matches_integral_weight_dimension() {
    for lam in [12u32, 14, 16] {
        let span = plus_span(lam, 80).unwrap();
        assert_eq!(span.rank(), dim_cusp(2 * lam), "lam = {lam}");
        assert_eq!(span.expected, span.rank());
        assert!(span.forms.iter().all(plus_check));
    }
    assert!(matches!(plus_span(13, 80), Err(Error::InvalidWeight(_))));
}

#[test]
fn eigenbasis_lifts_to_eigenforms() {
    let eb = plus_eigenbasis(12, 40, 200).unwrap();
    assert_eq!(eb.len(), 2);
    for e in &eb {
        assert!(e.lift_residual <= 1e-20, "{}", e.lift_residual);
        assert!(e.g.to_float(200).max_imag() <= 1e-30);
    }
}
