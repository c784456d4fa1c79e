//! One line per acceptance criterion. Exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use proptest::prelude::*;
use proptest::test_runner::{Config as PtConfig, TestRunner};
use rankin_cohen::brackets::{bracket_theta_dilated, bracket_theta_dilated_any, rc_bracket};
use rankin_cohen::halfint::{plus_span, plus_violation};
use rankin_cohen::harness::*;
use rankin_cohen::level1::{delta, dim_cusp, eigenforms, hecke, hecke_float, miller_basis, SpaceKind};
use rankin_cohen::numerics::factorial;
use rankin_cohen::petersson::{inner_level1, inner_plus_with, PlusOptions, RepSet};
use rankin_cohen::poincare::{poincare_eigen, poincare_kloosterman, unfold_pairing};
use rankin_cohen::qseries::Expansion;
use rankin_cohen::{BigComplex, ExactQSeries, FloatQSeries, HalfInt, Result};
use rug::Rational;

const PREC: u32 = HARNESS_PREC;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome { ok, detail: detail.into() })
}

fn ctx() -> Context {
    Context::new(PREC, Cache::disabled())
}

fn reports_line(reports: &[IdentityReport]) -> String {
    let worst = reports.iter().map(|r| r.rel_residual).fold(0.0, f64::max);
    let budget = reports.iter().map(|r| r.error_budget).fold(0.0, f64::max);
    format!("{} runs, max rel {worst:.2e}, max budget {budget:.2e}", reports.len())
}

fn failed(reports: &[IdentityReport]) -> Vec<String> {
    reports.iter().filter(|r| !r.passed()).map(|r| r.summary()).collect()
}

fn exact_brackets() -> Result<Outcome> {
    let cases = [(12, 0), (12, 1), (12, 2), (16, 1), (20, 2), (26, 1)];
    let ctx = ctx();
    let mut reports = Vec::new();
    for (k, nu) in cases {
        let t = Instant::now();
        let r = verify_prop21(&ctx, k, nu, 60, 0.0)?;
        let slow = t.elapsed().as_secs_f64() > 60.0;
        if r.residual != 0.0 || slow {
            return outcome(false, format!("k={k} nu={nu}: residual {:e}, {:?}", r.residual, t.elapsed()));
        }
        reports.push(r);
    }
    let bad = failed(&reports);
    outcome(bad.is_empty(), format!("{} cases, residual identically 0 through q^60 {}", reports.len(), bad.join("; ")))
}

fn poincare_dual_method() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for k in [12, 16] {
        let mut eig = eigenforms(k, 60, PREC)?;
        rankin_cohen::petersson::attach_norms(&mut eig, PREC)?;
        for m in [1, 2] {
            let a = poincare_kloosterman(k, m, 10, PREC, 1000)?;
            let b = poincare_eigen(k, m, 10, &eig, PREC)?;
            let allowed = a.coeffs.err() + b.coeffs.err();
            for n in 1..=10 {
                let d = a.coeffs.coeff(n)?.sub_ref(&b.coeffs.coeff(n)?).abs_f64();
                if d > allowed {
                    return outcome(false, format!("k={k} m={m} n={n}: |diff| {d:e} > {allowed:e}"));
                }
                worst = worst.max(d / allowed);
            }
        }
    }
    let p = poincare_kloosterman(12, 1, 10, PREC, 1000)?;
    let d = delta(10);
    let c = p.coeffs.coeff(1)?;
    let scale = p.coeffs.max_abs();
    let mut prop: f64 = 0.0;
    for n in 1..=10 {
        let tau = BigComplex::from_rational(PREC, &d.coeff(n)?);
        prop = prop.max(p.coeffs.coeff(n)?.sub_ref(&tau.mul_ref(&c)).abs_f64() / scale);
    }
    outcome(
        prop <= 1e-8,
        format!("max |diff|/err {worst:.2e}; P_12,1 vs Delta rel {prop:.2e} (tol 1e-8)"),
    )
}

fn quadrature_vs_unfolding() -> Result<Outcome> {
    let d = FloatQSeries::from_exact(&delta(30), PREC);
    let p = poincare_kloosterman(12, 1, 30, PREC, 1000)?;
    let v = inner_level1(&d, &p.coeffs, 12, PREC)?;
    // Gamma(11) / (4 pi)^11
    let expect = unfold_pairing(&BigComplex::one(PREC), 12, 1, 1, 1, PREC);
    let rel = v.value.sub_ref(&expect).abs_f64() / expect.abs_f64();
    let direct = factorial(10).to_f64() / (4.0 * std::f64::consts::PI).powi(11);
    let formula = (expect.re.to_f64() - direct).abs() / direct;
    outcome(
        rel <= 1e-6 && formula < 1e-14,
        format!("<Delta, P_12,1> rel {rel:.2e} (tol 1e-6)"),
    )
}

fn norm_engine() -> Result<Outcome> {
    let span = plus_span(12, 240)?;
    let shifted = PlusOptions { reps: RepSet::Shifted, ..Default::default() };
    let bad = PlusOptions { drop_case3_multiplicity: true, ..Default::default() };
    let bad_shifted = PlusOptions { reps: RepSet::Shifted, ..bad };
    let (mut worst, mut fault): (f64, f64) = (0.0, f64::INFINITY);
    for g in &span.forms {
        for h in &span.forms {
            let a = inner_plus_with(g, h, PREC, &PlusOptions::default())?;
            let b = inner_plus_with(g, h, PREC, &shifted)?;
            let err = a.total_err() + b.total_err();
            worst = worst.max(a.value.sub_ref(&b.value).abs_f64() / err);
        }
        let a = inner_plus_with(g, g, PREC, &bad)?;
        let b = inner_plus_with(g, g, PREC, &bad_shifted)?;
        fault = fault.min(a.value.sub_ref(&b.value).abs_f64() / (a.total_err() + b.total_err()));
    }
    outcome(
        worst <= 1.0 && fault > 1.0,
        format!("rep swap |diff|/err <= {worst:.2e}; fault control |diff|/err >= {fault:.2e}"),
    )
}

fn prop22() -> Result<Outcome> {
    let ctx = ctx();
    let cases = [(4, 12, 0, 1), (4, 12, 1, 1), (6, 12, 1, 2)];
    let mut comb = Vec::new();
    let mut inner = Vec::new();
    for (k1, k2, nu, m) in cases {
        comb.push(verify_prop22_combination(&ctx, k1, k2, nu, m, 10, 1e-6)?);
        inner.push(verify_prop22_inner(&ctx, k1, k2, nu, m, 1e-5)?);
    }
    let mut bad = failed(&comb);
    bad.extend(failed(&inner));
    outcome(
        bad.is_empty(),
        format!("combination (tol 1e-6): {}; inner (tol 1e-5): {} {}", reports_line(&comb), reports_line(&inner), bad.join("; ")),
    )
}

fn prop23() -> Result<Outcome> {
    let ctx = ctx();
    let mut reports = Vec::new();
    for nu in [0, 1] {
        for m in [1, 2] {
            reports.push(verify_prop23(&ctx, 12, nu, m, 1e-4)?);
        }
    }
    let bad = failed(&reports);
    let per_g = reports.iter().all(|r| r.diagnostic("basis_size") == Some(r.diagnostics.iter().filter(|d| d.name.starts_with("rel_residual_")).count() as f64));
    outcome(bad.is_empty() && per_g, format!("(tol 1e-4) {} {}", reports_line(&reports), bad.join("; ")))
}

fn thm24_cor25() -> Result<Outcome> {
    let ctx = ctx();
    let mut reports = Vec::new();
    for nu in [0, 1] {
        reports.push(verify_thm24(&ctx, 12, nu, 1, 40, 1e-5)?);
        reports.push(verify_cor25(&ctx, 12, nu, 1, 40, 1e-5)?);
    }
    let bad = failed(&reports);
    let fitted = reports.iter().map(|r| (r.fitted_constant - 1.0).abs()).fold(0.0, f64::max);
    let invariant = reports
        .iter()
        .filter(|r| r.identity == "thm24")
        .all(|r| r.diagnostic("rescale_verdict_invariant") == Some(1.0));
    outcome(
        bad.is_empty() && fitted <= 1e-5 && invariant,
        format!(
            "(tol 1e-5, N=40) {}, max |fitted-1| {fitted:.2e}, rescale invariant: {invariant} {}",
            reports_line(&reports),
            bad.join("; ")
        ),
    )
}

fn small_series() -> impl Strategy<Value = ExactQSeries> {
    proptest::collection::vec(-50i64..50, 12).prop_map(|v| {
        ExactQSeries::from_terms(1, 12, v.into_iter().enumerate().map(|(n, c)| (n as u64, Rational::from(c))))
    })
}

fn property_suites() -> Result<Outcome> {
    // Plus-space support of theta brackets.
    let mut brackets = 0;
    for k in [12, 16, 18, 20, 22, 26] {
        let f = miller_basis(k, SpaceKind::Cuspidal, 60)?.basis.remove(0);
        for nu in 0..=2 {
            let g = bracket_theta_dilated(&f, k, nu)?;
            if plus_violation(k + 2 * nu, &g.series).is_some() {
                return outcome(false, format!("[theta, f(4z)]_{nu} at k={k} leaves the plus space"));
            }
            brackets += 1;
        }
    }
    let p = poincare_kloosterman(12, 1, 60, PREC, 1000)?;
    for nu in 0..=1 {
        let g = bracket_theta_dilated_any(&Expansion::Float(p.coeffs.clone()), 12, nu, PREC)?;
        if plus_violation(12 + 2 * nu, &g.series).is_some() {
            return outcome(false, format!("[theta, P(4z)]_{nu} leaves the plus space"));
        }
        brackets += 1;
    }

    // Hecke relation T_p f = a(p) f.
    let mut forms = 0;
    let mut worst: f64 = 0.0;
    for k in 12..=40 {
        if k % 2 == 1 || dim_cusp(k) == 0 {
            continue;
        }
        let eig = eigenforms(k, 60, 256)?;
        for e in &eig.eigs {
            for p in [2u64, 3, 5] {
                if let Some(ex) = &e.exact {
                    let tp = hecke(k, p, ex)?;
                    if tp != ex.truncate(tp.trunc()).scale_rational(&ex.coeff(p)?) {
                        return outcome(false, format!("exact Hecke relation fails at k={k} p={p}"));
                    }
                } else {
                    let tp = hecke_float(k, p, &e.series)?;
                    let ap = e.series.coeff(p)?;
                    let rhs = e.series.truncate(tp.trunc()).scale(&ap, 0.0);
                    let d = tp.sub(&rhs)?;
                    worst = worst.max(d.max_abs() / tp.max_abs());
                }
            }
            forms += 1;
        }
    }
    if worst > 1e-20 {
        return outcome(false, format!("Hecke relation rel {worst:e} > 1e-20"));
    }

    // Leibniz rule, bilinearity, ring laws.
    let mut runner = TestRunner::new(PtConfig { cases: 64, failure_persistence: None, ..PtConfig::default() });
    let laws = runner.run(&(small_series(), small_series(), small_series(), -5i64..5), |(f, g, h, a)| {
        let a = Rational::from(a);
        let fg = f.mul(&g).unwrap();
        let leibniz = f.qderiv().mul(&g).unwrap().add(&f.mul(&g.qderiv()).unwrap()).unwrap();
        prop_assert_eq!(fg.qderiv(), leibniz);
        prop_assert_eq!(&fg, &g.mul(&f).unwrap());
        prop_assert_eq!(fg.mul(&h).unwrap(), f.mul(&g.mul(&h).unwrap()).unwrap());
        prop_assert_eq!(f.mul(&g.add(&h).unwrap()).unwrap(), fg.add(&f.mul(&h).unwrap()).unwrap());
        let (k1, k2) = (HalfInt::from(4u32), HalfInt::from_twice(13));
        for nu in 0..3 {
            let lhs = rc_bracket(&f.add(&h.scale_rational(&a)).unwrap(), k1, &g, k2, nu).unwrap();
            let rhs = rc_bracket(&f, k1, &g, k2, nu)
                .unwrap()
                .add(&rc_bracket(&h, k1, &g, k2, nu).unwrap().scale_rational(&a))
                .unwrap();
            prop_assert_eq!(lhs, rhs);
        }
        Ok(())
    });
    if let Err(e) = laws {
        return outcome(false, format!("property test failed: {e}"));
    }

    // Cache round trips.
    let dir = tempfile::tempdir()?;
    let cached = Context::new(PREC, Cache::at(dir.path())?);
    let fresh = ctx();
    let a = cached.eigen_data(24, 40, true)?;
    let b = cached.eigen_data(24, 40, true)?;
    let c = fresh.eigen_data(24, 40, true)?;
    let pa = cached.poincare(12, 2, 20)?;
    let pb = cached.poincare(12, 2, 20)?;
    let pc = fresh.poincare(12, 2, 20)?;
    let ra = verify_thm24(&cached, 12, 0, 1, 40, 1e-5)?.without_timings();
    let rb = verify_thm24(&cached, 12, 0, 1, 40, 1e-5)?.without_timings();
    let rc = verify_thm24(&fresh, 12, 0, 1, 40, 1e-5)?.without_timings();
    let round_trip = a == b && b == c && pa == pb && pb == pc && ra.to_json() == rb.to_json() && rb.to_json() == rc.to_json();
    outcome(
        round_trip,
        format!(
            "{brackets} brackets in the plus space, Hecke relation on {forms} eigenforms (max rel {worst:.1e}), 64 randomized law cases, cache round trip bit-identical: {round_trip}"
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Result<Outcome>); 8] = [
        ("exact theta brackets lift to [f, f]_2nu", exact_brackets),
        ("Poincare series: Kloosterman vs eigenform expansion", poincare_dual_method),
        ("quadrature vs unfolding for <Delta, P_12,1>", quadrature_vs_unfolding),
        ("Gamma0(4) norm engine: coset invariance and fault control", norm_engine),
        ("bracket with a Poincare series: combination and inner product", prop22),
        ("plus-space pairing with [theta, P(4z)]_nu", prop23),
        ("theta-bracket expansion and its Shimura image", thm24_cor25),
        ("property suites", property_suites),
    ];
    let mut all = true;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (ok, detail) = match check() {
            Ok(o) => (o.ok, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        all &= ok;
        println!(
            "{} [{}] {name}: {} ({:.1}s)",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            detail.trim_end(),
            t.elapsed().as_secs_f64()
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
