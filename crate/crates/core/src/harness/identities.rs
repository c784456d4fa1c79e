use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use super::context::{Context, PlusBasis};
use super::ell::{ell_nu, prop23_rhs, Approx};
use super::report::{diag, verdict, Comparison, Diagnostic, IdentityReport, Params, Timer};
use crate::brackets::{bracket_theta_dilated, bracket_theta_dilated_any, rc_bracket, rc_bracket_any, rc_bracket_float};
use crate::complex::BigComplex;
use crate::error::{Error, Result};
use crate::halfint::PlusForm;
use crate::level1::{dim_cusp, eisenstein, miller_basis, EigenData, SpaceKind};
use crate::numerics::{binomial, gamma_ratio, Ball};
use crate::petersson::{inner_level1_with, inner_plus_with, useful_terms, PlusOptions};
use crate::poincare::KloostermanOptions;
use crate::qseries::{unit, up, Expansion, FloatQSeries};
use crate::shimura::{shimura1, shimura1_float};
use crate::weight::HalfInt;

/// Terms of a level-1 eigenform kept for its Petersson norm.
const NORM_TERMS: u64 = 60;
/// Terms of `P_{k2,m}` in the inner-product form of the bracket identity.
const PAIRING_TERMS: u64 = 48;
/// Kloosterman tail tolerance for the Poincare series inside the level-4 pairing.
const PROP23_KLOOSTERMAN_TOL: f64 = 1e-16;
/// Seed of the rescaling re-test.
const RESCALE_SEED: u64 = 0x7e57_5eed;

struct Draft {
    identity: &'static str,
    params: Params,
    tol: f64,
    timer: Timer,
    diagnostics: Vec<Diagnostic>,
    notes: Vec<String>,
}

impl Draft {
    fn new(identity: &'static str, params: Params, tol: f64) -> Self {
        Self {
            identity,
            params,
            tol,
            timer: Timer::default(),
            diagnostics: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn vacuous(mut self, why: String) -> IdentityReport {
        self.notes.push(why);
        self.report(0.0, 0.0, (1.0, 0.0), 0.0, 0.0)
    }

    fn finish(self, cmp: &Comparison, budget_abs: f64) -> IdentityReport {
        let budget = relative(budget_abs, cmp.scale, 0.0);
        self.finish_with(cmp, cmp.rel(), budget)
    }

    fn finish_with(mut self, cmp: &Comparison, rel: f64, budget: f64) -> IdentityReport {
        if cmp.deviation() > self.tol && cmp.fit_rel <= self.tol {
            self.notes.push(format!(
                "scalar discrepancy: LHS matches {:.12} * RHS to {:.1e}",
                cmp.fitted.0, cmp.fit_rel
            ));
        }
        self.diagnostics.push(diag("fitted_constant_imag", cmp.fitted.1));
        self.report(cmp.residual, rel, cmp.fitted, cmp.deviation(), budget)
    }

    fn report(self, residual: f64, rel: f64, fitted: (f64, f64), deviation: f64, budget: f64) -> IdentityReport {
        IdentityReport {
            identity: self.identity.to_string(),
            params: self.params,
            residual,
            rel_residual: rel,
            fitted_constant: fitted.0,
            fitted_deviation: deviation,
            error_budget: budget,
            tolerance: self.tol,
            verdict: verdict(rel, deviation, budget, self.tol),
            diagnostics: self.diagnostics,
            notes: self.notes,
            timings_ms: self.timer.map,
        }
    }
}

fn relative(x: f64, scale: f64, zero: f64) -> f64 {
    if scale == 0.0 {
        if x == 0.0 {
            zero
        } else {
            f64::INFINITY
        }
    } else {
        x / scale
    }
}

fn coeffs(s: &FloatQSeries, lo: u64, hi: u64) -> Result<Vec<BigComplex>> {
    (lo..=hi).map(|n| s.coeff(n)).collect()
}

/// `x / b` for a value with error `x_err` and a positive ball `b`.
fn div_ball(x: &BigComplex, x_err: f64, b: &Ball, prec: u32) -> Result<(BigComplex, f64)> {
    let mid = b.mid.to_f64();
    if !(b.rad < mid) {
        return Err(Error::Precision(format!("norm {mid:e} not resolved (radius {:e})", b.rad)));
    }
    let q = x.mul_float(&(Float::with_val(prec, 1) / &b.mid));
    let xa = x.abs_f64();
    let err = x_err / (mid - b.rad) + xa * b.rad / (mid * (mid - b.rad)) + q.abs_f64() * unit(prec) * 4.0;
    Ok((q, up(err)))
}

/// `10 max |a(n)| / n^e` over the stored coefficients with `n >= 1`.
fn growth_constant(s: &FloatQSeries, e: f64) -> f64 {
    10.0 * s
        .terms()
        .filter(|(n, _)| *n > 0)
        .map(|(n, c)| c.abs_f64() / (n as f64).powf(e))
        .fold(0.0, f64::max)
}

/// `Gamma(K-1) / (4 pi)^(K-1)`.
fn unfold_factor(kk: u32, prec: u32) -> Float {
    let g = Float::with_val(prec, crate::numerics::factorial(kk - 2));
    let base = Float::with_val(prec, Constant::Pi) * 4u32;
    g / base.pow(kk - 1)
}

/// `a_j(m) / (m^(k-1) <f_j, f_j>)` with error bounds, in eigenform order.
fn eigen_weights(eig: &EigenData, m: u64, prec: u32) -> Result<Vec<(BigComplex, f64)>> {
    let norms = eig.norms()?;
    let mk = Float::with_val(prec, Integer::from(m).pow(eig.k - 1));
    eig.eigs
        .iter()
        .zip(norms)
        .map(|(f, n)| {
            let am = f.series.coeff(m)?;
            let x = am.mul_float(&(Float::with_val(prec, 1) / &mk));
            let x_err = f.series.err() / mk.to_f64();
            div_ball(&x, x_err, n, prec)
        })
        .collect()
}

/// `ell_nu(g_mu, m) / <g_mu, g_mu>` with error bounds.
fn plus_weights(
    forms: &[&PlusForm],
    norms: &[Ball],
    k: u32,
    nu: u32,
    m: u64,
    prec: u32,
) -> Result<Vec<(BigComplex, f64)>> {
    forms
        .iter()
        .zip(norms)
        .map(|(g, n)| {
            let l = ell_nu(g, k, nu, m, prec)?;
            div_ball(&l.value, l.err, n, prec)
        })
        .collect()
}

fn combine(items: &[(BigComplex, f64, FloatQSeries)], width: u32, trunc: u64, prec: u32) -> Result<FloatQSeries> {
    if items.is_empty() {
        return Ok(FloatQSeries::zero(width, trunc, prec));
    }
    let refs: Vec<_> = items.iter().map(|(c, e, s)| (c.clone(), *e, s)).collect();
    FloatQSeries::linear_combination(&refs)
}

fn params(k: Option<u32>, nu: u32, m: Option<u64>, trunc: Option<u64>, prec: u32) -> Params {
    Params {
        k,
        nu,
        m,
        trunc,
        prec,
        ..Default::default()
    }
}

fn check_m(m: u64) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be a positive integer".into()));
    }
    Ok(())
}

/// `(k+2nu-1)!/(k+nu-1)! S_1([theta, f(4 tau)]_nu) = [f, f]_{2nu}` for every
/// normalised eigenform `f` of `S_k`, through `q^n`. Exact when `S_k` is
/// one-dimensional.
pub fn verify_prop21(ctx: &Context, k: u32, nu: u32, n: u64, tol: f64) -> Result<IdentityReport> {
    let prec = ctx.prec;
    let mut d = Draft::new("prop21", params(Some(k), nu, None, Some(n), prec), tol);
    let dim = dim_cusp(k);
    if dim == 0 {
        return Ok(d.vacuous(format!("S_{k} = 0: both sides vanish")));
    }
    let h_trunc = (n * n).div_ceil(4);
    let scalar = gamma_ratio(HalfInt::from(k + 2 * nu), HalfInt::from(k + nu))?;
    let (hk, h2) = (HalfInt::from(k), HalfInt::from(k));

    if dim == 1 {
        let f = d.timer.time("basis", || miller_basis(k, SpaceKind::Cuspidal, h_trunc))?;
        let f = &f.basis[0];
        let bracket = d.timer.time("bracket", || bracket_theta_dilated(f, k, nu))?;
        let lift = d.timer.time("shimura", || shimura1(&bracket, n))?;
        let lhs = lift.as_exact().expect("exact input").scale_rational(&scalar);
        let rhs = d.timer.time("rhs", || rc_bracket(&f.truncate(n), hk, &f.truncate(n), h2, 2 * nu))?;
        let diff = lhs.sub(&rhs)?;
        d.diagnostics.push(diag("exact_nonzero_terms", diff.nnz() as f64));
        d.notes.push("exact rational arithmetic".into());
        let l = coeffs(&FloatQSeries::from_exact(&lhs, prec), 1, n)?;
        let r = coeffs(&FloatQSeries::from_exact(&rhs, prec), 1, n)?;
        let mut cmp = Comparison::new(&l, &r);
        // The exact difference decides; the float residual only rounds it.
        cmp.residual = diff.terms().map(|(_, c)| c.to_f64().abs()).fold(0.0, f64::max);
        return Ok(d.finish(&cmp, 0.0));
    }

    // f_j = sum_i a_j(i) b_i on the reduced Miller basis; both sides are
    // built exactly on the basis and only the final combination is inexact.
    let basis = d.timer.time("basis", || miller_basis(k, SpaceKind::Cuspidal, h_trunc))?;
    let eig = d.timer.time("eigenforms", || ctx.eigen_data(k, NORM_TERMS.max(dim as u64 + 1), false))?;
    let lifts = d.timer.time("shimura", || {
        basis
            .basis
            .iter()
            .map(|b| {
                let br = bracket_theta_dilated(b, k, nu)?;
                let lift = shimura1(&br, n)?;
                Ok(FloatQSeries::from_exact(&lift.as_exact().expect("exact input").scale_rational(&scalar), prec))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let low: Vec<_> = basis.basis.iter().map(|b| b.truncate(n)).collect();
    let mut pairs = Vec::new();
    for i in 0..dim {
        for j in 0..dim {
            let br = rc_bracket(&low[i], hk, &low[j], h2, 2 * nu)?;
            pairs.push(FloatQSeries::from_exact(&br, prec));
        }
    }
    let (mut l, mut r) = (Vec::new(), Vec::new());
    let mut budget: f64 = 0.0;
    for f in &eig.eigs {
        let e = f.series.err();
        let v = basis.pivots().iter().map(|&p| f.series.coeff(p)).collect::<Result<Vec<_>>>()?;
        let items: Vec<_> = v.iter().cloned().zip(&lifts).map(|(c, s)| (c, e, s.clone())).collect();
        let lhs = combine(&items, 1, n, prec)?;
        let mut items = Vec::new();
        for i in 0..dim {
            for j in 0..dim {
                let c = v[i].mul_ref(&v[j]);
                let ce = e * (v[i].abs_f64() + v[j].abs_f64() + e);
                items.push((c, ce, pairs[i * dim + j].clone()));
            }
        }
        let rhs = combine(&items, 1, n, prec)?;
        budget += lhs.err() + rhs.err();
        l.extend(coeffs(&lhs, 1, n)?);
        r.extend(coeffs(&rhs, 1, n)?);
    }
    d.notes.push(format!("{dim} eigenforms: exact brackets of basis forms, combined in {prec}-bit arithmetic"));
    Ok(d.finish(&Comparison::new(&l, &r), budget))
}

/// `(-m)^mu C(nu, mu) Gamma(k1+nu) Gamma(k2+nu) / (Gamma(k2+mu) Gamma(k1+nu-mu))`.
fn prop22_weights(k1: u32, k2: u32, nu: u32, m: u64) -> Result<Vec<Rational>> {
    (0..=nu)
        .map(|mu| {
            let g = gamma_ratio(HalfInt::from(k1 + nu), HalfInt::from(k1 + nu - mu))?
                * gamma_ratio(HalfInt::from(k2 + nu), HalfInt::from(k2 + mu))?;
            Ok(Rational::from(-(m as i64)).pow(mu as i32) * binomial(nu, mu) * g)
        })
        .collect()
}

/// `W(n) = sum_mu w_mu n^(nu-mu) b(n)`, with `0^0 = 1`.
fn prop22_row(w: &[Rational], nu: u32, n: u64, b: &Rational) -> Rational {
    let mut acc = Rational::new();
    for (mu, wm) in w.iter().enumerate() {
        let e = nu - mu as u32;
        if n == 0 && e > 0 {
            continue;
        }
        acc += Rational::from(wm * Integer::from(n).pow(e));
    }
    acc * b
}

/// `sum_{n > n0} n^e <= n0^(e+1) / (-e-1)` for `e < -1`.
fn power_tail(n0: u64, e: f64) -> f64 {
    if e >= -1.0 || n0 == 0 {
        f64::INFINITY
    } else {
        (n0 as f64).powf(e + 1.0) / (-e - 1.0)
    }
}

fn check_prop22(k1: u32, k2: u32) -> Result<()> {
    if k1 < 4 || k1 % 2 == 1 || k2 < 4 || k2 % 2 == 1 {
        return Err(Error::InvalidWeight(format!("need even k1, k2 >= 4, got {k1}, {k2}")));
    }
    Ok(())
}

fn prop22_params(k1: u32, k2: u32, nu: u32, m: u64, trunc: Option<u64>, prec: u32) -> Params {
    Params {
        k: Some(k1 + k2 + 2 * nu),
        k1: Some(k1),
        k2: Some(k2),
        nu,
        m: Some(m),
        trunc,
        prec,
    }
}

/// Doublings of the cutoff tried before the bracket-identity sums give up.
const MAX_DOUBLINGS: u32 = 5;

/// Tail estimate of a series from its partial sums at `N/4`, `N/2` and `N`:
/// ten times the larger of the last block and a quarter of the one before.
/// The quarter uses the at-least-quadratic decay of the tail guaranteed by
/// the growth exponents.
fn block_tail(s4: &[BigComplex], s2: &[BigComplex], s1: &[BigComplex]) -> f64 {
    let block = |a: &[BigComplex], b: &[BigComplex]| {
        a.iter().zip(b).map(|(x, y)| x.sub_ref(y).abs_f64()).fold(0.0, f64::max)
    };
    10.0 * block(s1, s2).max(block(s2, s4) / 4.0)
}

/// `|b(n)| <= zeta(k1-1) |b(1)| n^(k1-1)` for the Eisenstein series.
fn eisenstein_growth(g: &rug::Rational, k1: u32) -> f64 {
    let zeta: f64 = (1..2000).map(|n| (n as f64).powi(1 - k1 as i32)).sum::<f64>() + 1e-9;
    zeta * g.to_f64().abs()
}

/// Absolute-value bound on the `n > n_cut` part of
/// `sum_n W(n) a(n+m) / (n+m)^(K-1)`, from `|a(M)| <= C M^(K/2)` and the
/// Eisenstein growth.
fn prop22_tail_bound(c_a: f64, b1: &rug::Rational, w: &[Rational], k1: u32, k2: u32, n_cut: u64) -> f64 {
    let wsum: f64 = w.iter().map(|x| x.to_f64().abs()).sum();
    let e = (k1 as f64 - k2 as f64) / 2.0;
    c_a * eisenstein_growth(b1, k1) * wsum * power_tail(n_cut, e)
}

/// `sum_{n <= n_cut} W(n) P_{K,n+m}` through `q^n_out`, the Poincare
/// series by eigenform expansion, with an estimate of the omitted tail.
fn prop22_comb_rhs(ctx: &Context, k1: u32, k2: u32, nu: u32, m: u64, n_out: u64, n_cut: u64) -> Result<(FloatQSeries, f64)> {
    let prec = ctx.prec;
    let kk = k1 + k2 + 2 * nu;
    let g = eisenstein(k1, n_cut)?;
    let eig = ctx.eigen_data(kk, n_cut + m, true)?;
    let w = prop22_weights(k1, k2, nu, m)?;
    let mut rhs = FloatQSeries::zero(1, n_out, prec);
    let mut snaps = Vec::new();
    for j in 0..=n_cut {
        let row = prop22_row(&w, nu, j, &g.coeff(j)?);
        if row != 0 {
            let pj = crate::poincare::poincare_eigen(kk, j + m, n_out, &eig, prec)?;
            rhs = rhs.add(&pj.coeffs.scale_rational(&row))?;
        }
        if j == n_cut / 4 || j == n_cut / 2 {
            snaps.push(coeffs(&rhs, 1, n_out)?);
        }
    }
    let estimate = block_tail(&snaps[0], &snaps[1], &coeffs(&rhs, 1, n_out)?);
    let norms = eig.norms()?;
    let mut c_a = 0.0;
    for (f, nrm) in eig.eigs.iter().zip(&norms) {
        let cj = growth_constant(&f.series, kk as f64 / 2.0);
        c_a += cj * f.series.truncate(n_out).max_abs() / (nrm.mid.to_f64() - nrm.rad);
    }
    let c_a = c_a * unfold_factor(kk, 64).to_f64();
    let bound = prop22_tail_bound(c_a, &g.coeff(1)?, &w, k1, k2, n_cut);
    Ok((rhs, bound.min(estimate)))
}

/// `[E_k1, P_{k2,m}]_nu` against `sum_n W(n) P_{k1+k2+2nu, n+m}`, through
/// `q^n`. The left side uses the Kloosterman expansion of `P`, the right
/// side the eigenform expansion of each `P_{K,n+m}`; the `n`-sum is cut
/// off at the context's cutoff, doubled until the tail fits the tolerance.
pub fn verify_prop22_combination(
    ctx: &Context,
    k1: u32,
    k2: u32,
    nu: u32,
    m: u64,
    n: u64,
    tol: f64,
) -> Result<IdentityReport> {
    check_prop22(k1, k2)?;
    check_m(m)?;
    let prec = ctx.prec;
    let mut d = Draft::new("prop22-comb", prop22_params(k1, k2, nu, m, Some(n), prec), tol);

    let p = d.timer.time("poincare", || ctx.poincare(k2, m, n))?;
    let g = FloatQSeries::from_exact(&eisenstein(k1, n)?, prec);
    let lhs = d.timer.time("bracket", || {
        rc_bracket_float(&g, HalfInt::from(k1), &p.coeffs, HalfInt::from(k2), nu)
    })?;
    let l = coeffs(&lhs, 1, n)?;
    let scale = l.iter().map(|c| c.abs_f64()).fold(0.0, f64::max);

    let mut n_cut = ctx.series_cutoff;
    let (rhs, tail) = loop {
        let (rhs, tail) = d.timer.time("rhs", || prop22_comb_rhs(ctx, k1, k2, nu, m, n, n_cut))?;
        if relative(tail + rhs.err(), scale, 0.0) <= tol / 4.0 || n_cut >= ctx.series_cutoff << MAX_DOUBLINGS {
            break (rhs, tail);
        }
        n_cut *= 2;
    };
    d.diagnostics.push(diag("tail", tail));
    d.diagnostics.push(diag("cutoff", n_cut as f64));
    d.notes.push(format!("g = E_{k1}; RHS Poincare series by eigenform expansion"));

    let r = coeffs(&rhs, 1, n)?;
    let budget = lhs.err() + rhs.err() + tail;
    Ok(d.finish(&Comparison::new(&l, &r), budget))
}

/// The closed form of `<f, [E_k1, P_{k2,m}]_nu>` summed over `n <= n_cut`,
/// for an eigenform `f` of weight `k1 + k2 + 2 nu` known past `n_cut + m`.
/// The error includes the smaller of an absolute tail bound and the block
/// estimate from the partial sums at `n_cut / 4` and `n_cut / 2`.
pub fn prop22_inner_rhs(f: &FloatQSeries, k1: u32, k2: u32, nu: u32, m: u64, n_cut: u64, prec: u32) -> Result<Approx> {
    let kk = k1 + k2 + 2 * nu;
    let wp = prec + 32;
    let g = eisenstein(k1, n_cut)?;
    let w = prop22_weights(k1, k2, nu, m)?;
    let pre = unfold_factor(kk, wp);
    let mut acc = BigComplex::zero(wp);
    let mut snaps = Vec::new();
    let mut noise = 0.0;
    for j in 0..=n_cut {
        let row = prop22_row(&w, nu, j, &g.coeff(j)?);
        if row != 0 {
            let big = j + m;
            let den = Float::with_val(wp, Integer::from(big).pow(kk - 1));
            let rf = Float::with_val(wp, &row) / &den;
            noise += rf.to_f64().abs() * f.err();
            acc.add_assign_ref(&f.coeff(big)?.mul_float(&rf));
        }
        if j == n_cut / 4 || j == n_cut / 2 {
            snaps.push(vec![acc.mul_float(&pre)]);
        }
    }
    let value = acc.mul_float(&pre);
    let estimate = block_tail(&snaps[0], &snaps[1], std::slice::from_ref(&value));
    let p = pre.to_f64();
    let bound = prop22_tail_bound(p * growth_constant(f, kk as f64 / 2.0), &g.coeff(1)?, &w, k1, k2, n_cut);
    let value = value.with_prec(prec);
    let err = up(bound.min(estimate) + p * noise + value.abs_f64() * unit(prec) * (n_cut as f64 + 8.0));
    Ok(Approx { value, err })
}

/// `<f, [E_k1, P_{k2,m}]_nu>` by quadrature against the closed-form sum,
/// for the first eigenform `f` of weight `k1 + k2 + 2 nu`.
pub fn verify_prop22_inner(ctx: &Context, k1: u32, k2: u32, nu: u32, m: u64, tol: f64) -> Result<IdentityReport> {
    check_prop22(k1, k2)?;
    check_m(m)?;
    let prec = ctx.prec;
    let kk = k1 + k2 + 2 * nu;
    let mut d = Draft::new("prop22-inner", prop22_params(k1, k2, nu, m, None, prec), tol);
    if dim_cusp(kk) == 0 {
        return Ok(d.vacuous(format!("S_{kk} = 0: no cusp form to pair with")));
    }
    // P = sum_j c_j f_j over the eigenforms of S_k2, so the pairing is
    // sum_j conj(c_j) <f, [E_k1, f_j]_nu>: each bracket then has exact or
    // near-exact coefficients and the error of c_j stays relative.
    let np = PAIRING_TERMS;
    let eig2 = d.timer.time("eigenforms", || ctx.eigen_data(k2, np.max(m), true))?;
    let pre = unfold_factor(k2, prec) / Float::with_val(prec, Integer::from(m).pow(k2 - 1));
    let g = Expansion::Exact(eisenstein(k1, np)?);
    let mut parts = Vec::new();
    for (fj, nrm) in eig2.eigs.iter().zip(eig2.norms()?) {
        let am = fj.series.coeff(m)?.mul_float(&pre);
        let (c, c_err) = div_ball(&am, fj.series.err() * pre.to_f64(), nrm, prec)?;
        let series = match &fj.exact {
            Some(e) => Expansion::Exact(e.truncate(np)),
            None => Expansion::Float(fj.series.truncate(np)),
        };
        let bracket = rc_bracket_any(&g, HalfInt::from(k1), &series, HalfInt::from(k2), nu, prec)?.to_float(prec);
        parts.push((c, c_err, bracket));
    }
    let mut n_cut = ctx.series_cutoff;
    let (f, rhs) = loop {
        let eig = d.timer.time("eigenforms", || ctx.eigen_data(kk, n_cut + m, false))?;
        let f = eig.eigs[0].series.clone();
        let rhs = d.timer.time("rhs", || prop22_inner_rhs(&f, k1, k2, nu, m, n_cut, prec))?;
        if relative(rhs.err, rhs.value.abs_f64(), 0.0) <= tol / 4.0 || n_cut >= ctx.series_cutoff << MAX_DOUBLINGS {
            break (f, rhs);
        }
        n_cut *= 2;
    };
    let mut lhs = BigComplex::zero(prec);
    let (mut quad_err, mut trunc_err, mut lhs_err) = (0.0, 0.0, 0.0);
    for (c, c_err, bracket) in &parts {
        let ip = d.timer.time("quadrature", || inner_level1_with(&f.truncate(np), bracket, kk, prec, &ctx.quad))?;
        lhs.add_assign_ref(&ip.value.mul_ref(&c.conj()));
        quad_err += c.abs_f64() * ip.quad_err;
        trunc_err += c.abs_f64() * ip.trunc_err;
        lhs_err += c.abs_f64() * ip.total_err() + c_err * (ip.value.abs_f64() + ip.total_err());
    }
    d.diagnostics.push(diag("quad_err", quad_err));
    d.diagnostics.push(diag("trunc_err", trunc_err));
    d.diagnostics.push(diag("rhs_err", rhs.err));
    d.diagnostics.push(diag("cutoff", n_cut as f64));
    d.notes.push(format!("g = E_{k1}; f = first eigenform of S_{kk}; P by eigenform expansion"));
    let cmp = Comparison::new(std::slice::from_ref(&lhs), std::slice::from_ref(&rhs.value));
    Ok(d.finish(&cmp, up(lhs_err) + rhs.err))
}

fn plus_forms(b: &PlusBasis) -> Vec<&PlusForm> {
    b.forms.iter().map(|f| &f.g).collect()
}

/// `<g, [theta, P_{k,m}(4 tau)]_nu>` by level-4 quadrature against the
/// theta-pairing sum, for each `g` of the plus eigenbasis of weight
/// `k + 2 nu + 1/2`. `rel_residual` is the largest per-form relative
/// residual.
pub fn verify_prop23(ctx: &Context, k: u32, nu: u32, m: u64, tol: f64) -> Result<IdentityReport> {
    check_m(m)?;
    let prec = ctx.prec;
    let lam = k + 2 * nu;
    let mut d = Draft::new("prop23", params(Some(k), nu, Some(m), None, prec), tol);
    if lam < 12 || dim_cusp(2 * lam) == 0 {
        return Ok(d.vacuous(format!("plus space of weight {lam}+1/2 is zero")));
    }
    let np = useful_terms(4, 2 * lam + 1, prec) / 4 + 1;
    // The bracket and the level-4 quadrature amplify the uniform Kloosterman
    // error, so the tail is pushed further down than the default.
    let opts = KloostermanOptions {
        tol: ctx.kloosterman.tol.min(PROP23_KLOOSTERMAN_TOL),
        ..ctx.kloosterman
    };
    let p = d.timer.time("poincare", || ctx.poincare_with(k, m, np, &opts))?;
    d.diagnostics.push(diag("poincare_err", p.coeffs.err()));
    let h = d.timer.time("bracket", || bracket_theta_dilated_any(&Expansion::Float(p.coeffs.clone()), k, nu, prec))?;
    let basis = d.timer.time("plus_basis", || ctx.plus_basis(lam, ctx.series_cutoff))?;
    let opts = PlusOptions {
        quad: ctx.quad,
        ..Default::default()
    };
    let (mut l, mut r) = (Vec::new(), Vec::new());
    let (mut worst, mut budget) = (0.0f64, 0.0f64);
    for (i, g) in plus_forms(&basis).into_iter().enumerate() {
        let lhs = d.timer.time("quadrature", || inner_plus_with(g, &h, prec, &opts))?;
        let rhs = prop23_rhs(g, k, nu, m, prec)?;
        let scale = rhs.value.abs_f64();
        let rel = relative(lhs.value.sub_ref(&rhs.value).abs_f64(), scale, 0.0);
        let b = relative(lhs.total_err() + rhs.err, scale, 0.0);
        d.diagnostics.push(diag(&format!("rel_residual_{i}"), rel));
        worst = worst.max(rel);
        budget = budget.max(b);
        l.push(lhs.value);
        r.push(rhs.value);
    }
    d.diagnostics.push(diag("basis_size", r.len() as f64));
    d.diagnostics.push(diag("poincare_terms", np as f64));
    let cmp = Comparison::new(&l, &r);
    Ok(d.finish_with(&cmp, worst, budget))
}

/// Left side of the theta-lift identity through `q^n`:
/// `sum_j a_j(m) / (m^(k-1) <f_j, f_j>) [theta, f_j(4 tau)]_nu`.
fn thm24_lhs(eig: &EigenData, ew: &[(BigComplex, f64)], nu: u32, n: u64, prec: u32) -> Result<FloatQSeries> {
    let h_trunc = n.div_ceil(4);
    let mut items = Vec::new();
    for (f, (c, e)) in eig.eigs.iter().zip(ew) {
        let b = bracket_theta_dilated_any(&Expansion::Float(f.series.truncate(h_trunc)), eig.k, nu, prec)?;
        items.push((c.clone(), *e, b.to_float(prec).truncate(n)));
    }
    combine(&items, 1, n, prec)
}

fn thm24_rhs(forms: &[&PlusForm], pw: &[(BigComplex, f64)], n: u64, prec: u32) -> Result<FloatQSeries> {
    let items: Vec<_> = forms
        .iter()
        .zip(pw)
        .map(|(g, (c, e))| (c.clone(), *e, g.to_float(prec).truncate(n)))
        .collect();
    combine(&items, 1, n, prec)
}

fn eig_trunc(n: u64, m: u64) -> u64 {
    NORM_TERMS.max(n.div_ceil(4)).max(m)
}

fn check_thm24(k: u32, m: u64) -> Result<()> {
    check_m(m)?;
    if k < 4 || k % 2 == 1 {
        return Err(Error::InvalidWeight(format!("need even k >= 4, got {k}")));
    }
    Ok(())
}

/// `sum_j a_j(m)/(m^(k-1) <f_j,f_j>) [theta, f_j(4 tau)]_nu
///  = sum_mu l_nu(g_mu, m)/<g_mu,g_mu> g_mu` through `q^n`, followed by
/// the same comparison with every `g_mu` rescaled by a random real factor.
pub fn verify_thm24(ctx: &Context, k: u32, nu: u32, m: u64, n: u64, tol: f64) -> Result<IdentityReport> {
    check_thm24(k, m)?;
    let prec = ctx.prec;
    let lam = k + 2 * nu;
    let mut d = Draft::new("thm24", params(Some(k), nu, Some(m), Some(n), prec), tol);
    if dim_cusp(k) == 0 || lam < 12 {
        return Ok(d.vacuous(format!("S_{k} = 0: both sides vanish")));
    }
    let eig = d.timer.time("eigenforms", || ctx.eigen_data(k, eig_trunc(n, m), true))?;
    let ew = eigen_weights(&eig, m, prec)?;
    let lhs = d.timer.time("lhs", || thm24_lhs(&eig, &ew, nu, n, prec))?;
    let basis = d.timer.time("plus_basis", || ctx.plus_basis(lam, ctx.series_cutoff.max(n)))?;
    let forms = plus_forms(&basis);
    let pw = d.timer.time("ell", || plus_weights(&forms, &basis.norms, k, nu, m, prec))?;
    let rhs = thm24_rhs(&forms, &pw, n, prec)?;
    let l = coeffs(&lhs, 1, n)?;
    let r = coeffs(&rhs, 1, n)?;
    let cmp = Comparison::new(&l, &r);
    let budget_abs = lhs.err() + rhs.err();
    let base_verdict = verdict(cmp.rel(), cmp.deviation(), relative(budget_abs, cmp.scale, 0.0), tol);

    // Rescaling: each term ell(g)/<g,g> g is invariant under real g -> s g.
    let mut rng = ChaCha8Rng::seed_from_u64(RESCALE_SEED);
    let scaled: Vec<PlusForm> = forms
        .iter()
        .map(|g| {
            let s: f64 = rng.gen_range(0.2..5.0);
            g.scaled(&BigComplex::from_f64(prec, s, 0.0), 0.0, prec)
        })
        .collect();
    let scaled_refs: Vec<&PlusForm> = scaled.iter().collect();
    let scaled_norms = d.timer.time("rescale", || ctx.plus_norms(&scaled))?;
    let spw = plus_weights(&scaled_refs, &scaled_norms, k, nu, m, prec)?;
    let srhs = thm24_rhs(&scaled_refs, &spw, n, prec)?;
    let scmp = Comparison::new(&l, &coeffs(&srhs, 1, n)?);
    let sbudget = relative(lhs.err() + srhs.err(), scmp.scale, 0.0);
    let s_verdict = verdict(scmp.rel(), scmp.deviation(), sbudget, tol);
    d.diagnostics.push(diag("rescaled_rel_residual", scmp.rel()));
    d.diagnostics.push(diag("rescaled_fitted_constant", scmp.fitted.0));
    d.diagnostics.push(diag("rescale_verdict_invariant", (s_verdict == base_verdict) as u8 as f64));
    d.diagnostics.push(diag("basis_size", forms.len() as f64));
    Ok(d.finish(&cmp, budget_abs))
}

/// The Shimura image of the theta-lift identity:
/// `Gamma(k+nu)/Gamma(k+2nu) sum_j a_j(m)/(m^(k-1) <f_j,f_j>) [f_j, f_j]_{2nu}
///  = sum_mu l_nu(g_mu, m)/<g_mu,g_mu> c_mu(1) F_mu`, with a cross-check
/// that lifting the theta-side sum term by term reproduces the left side.
pub fn verify_cor25(ctx: &Context, k: u32, nu: u32, m: u64, n: u64, tol: f64) -> Result<IdentityReport> {
    check_thm24(k, m)?;
    let prec = ctx.prec;
    let lam = k + 2 * nu;
    let mut d = Draft::new("cor25", params(Some(k), nu, Some(m), Some(n), prec), tol);
    if dim_cusp(k) == 0 || lam < 12 {
        return Ok(d.vacuous(format!("S_{k} = 0: both sides vanish")));
    }
    let cross_n: u64 = 6.min(n);
    let eig = d.timer.time("eigenforms", || {
        ctx.eigen_data(k, eig_trunc(n, m).max(eig_trunc(cross_n * cross_n, m)), true)
    })?;
    let ew = eigen_weights(&eig, m, prec)?;
    let ratio = gamma_ratio(HalfInt::from(k + nu), HalfInt::from(k + 2 * nu))?;
    let hk = HalfInt::from(k);
    let mut items = Vec::new();
    for (f, (c, e)) in eig.eigs.iter().zip(&ew) {
        let s = f.series.truncate(n);
        items.push((c.clone(), *e, rc_bracket_float(&s, hk, &s, hk, 2 * nu)?));
    }
    let lhs = combine(&items, 1, n, prec)?.scale_rational(&ratio);

    let basis = d.timer.time("plus_basis", || ctx.plus_basis(lam, ctx.series_cutoff))?;
    let forms = plus_forms(&basis);
    let pw = d.timer.time("ell", || plus_weights(&forms, &basis.norms, k, nu, m, prec))?;
    let big = d.timer.time("eigenforms", || ctx.eigen_data(2 * lam, n, false))?;
    let mut items = Vec::new();
    for (g, (c, e)) in basis.forms.iter().zip(&pw) {
        let f = big
            .eigs
            .iter()
            .min_by(|a, b| {
                let da = Float::with_val(prec, &a.lambda2 - &g.lambda2).abs();
                let db = Float::with_val(prec, &b.lambda2 - &g.lambda2).abs();
                da.partial_cmp(&db).expect("finite eigenvalues")
            })
            .ok_or_else(|| Error::InvalidArgument(format!("S_{} is empty", 2 * lam)))?;
        let coef = c.mul_ref(&g.c1);
        let err = e * g.c1.abs_f64() + coef.abs_f64() * unit(prec) * 4.0;
        items.push((coef, err, f.series.truncate(n)));
    }
    let rhs = combine(&items, 1, n, prec)?;

    // Term-by-term lift of the theta side.
    let theta_side = thm24_lhs(&eig, &ew, nu, cross_n * cross_n, prec)?;
    let lifted = shimura1_float(&theta_side, lam, cross_n)?;
    let cross = Comparison::new(&coeffs(&lifted, 1, cross_n)?, &coeffs(&lhs.truncate(cross_n), 1, cross_n)?);
    d.diagnostics.push(diag("shimura_cross_check_rel", cross.rel()));
    d.diagnostics.push(diag(
        "shimura_cross_check_budget",
        relative(lifted.err() + lhs.err(), cross.scale, 0.0),
    ));
    d.diagnostics.push(diag("basis_size", forms.len() as f64));

    let l = coeffs(&lhs, 1, n)?;
    let r = coeffs(&rhs, 1, n)?;
    Ok(d.finish(&Comparison::new(&l, &r), lhs.err() + rhs.err()))
}
