//! Gauss-Legendre quadrature over the standard fundamental domain
//! `{|x| <= 1/2, |tau| >= 1}` for integrands `f(tau) conj(g(tau)) y^kappa dmu`,
//! with the part above `y = Y` summed termwise in closed form.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

use crate::complex::BigComplex;
use crate::error::{Error, Result};
use crate::qseries::{unit, up, FloatQSeries};

type Rule = Arc<Vec<(Float, Float)>>;

/// Nodes and weights of the `n`-point rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize, prec: u32) -> Rule {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u32), Rule>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(r) = cache.lock().unwrap().get(&(n, prec)) {
        return r.clone();
    }
    let rule = Arc::new(compute_rule(n, prec));
    cache.lock().unwrap().insert((n, prec), rule.clone());
    rule
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: &Float) -> (Float, Float) {
    let prec = x.prec();
    let mut p0 = Float::with_val(prec, 1);
    let mut p1 = x.clone();
    for j in 2..=n {
        let a = Float::with_val(prec, x * &p1) * (2 * j - 1) as u32;
        let p2 = (a - Float::with_val(prec, &p0 * (j - 1) as u32)) / j as u32;
        p0 = p1;
        p1 = p2;
    }
    let one_minus = Float::with_val(prec, 1) - Float::with_val(prec, x.square_ref());
    let d = (Float::with_val(prec, &p0 - x * &p1.clone()) * n as u32) / one_minus;
    (p1, d)
}

fn compute_rule(n: usize, prec: u32) -> Vec<(Float, Float)> {
    let wp = prec + 32;
    let pi = Float::with_val(wp, Constant::Pi);
    let tiny = Float::with_val(wp, Float::i_exp(1, -(prec as i32) - 8));
    let mut out = Vec::with_capacity(n);
    for i in 1..=n {
        let t = Float::with_val(wp, i as f64 - 0.25) / (n as f64 + 0.5);
        let mut x = Float::with_val(wp, &pi * &t).cos();
        for _ in 0..200 {
            let (p, d) = legendre(n, &x);
            let dx = p / &d;
            x -= &dx;
            if dx.abs() < tiny {
                break;
            }
        }
        let (_, d) = legendre(n, &x);
        let one_minus = Float::with_val(wp, 1) - Float::with_val(wp, x.square_ref());
        let w = Float::with_val(wp, 2) / (one_minus * Float::with_val(wp, d.square_ref()));
        out.push((Float::with_val(prec, x), Float::with_val(prec, w)));
    }
    out
}

/// Quadrature settings. `nx`, `ny` nodes are used for the value and half as
/// many for the error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadOptions {
    pub nx: usize,
    pub ny: usize,
    /// Height above which the integral is summed in closed form.
    pub y_split: f64,
    /// Cap on the number of coefficients used from each series.
    pub max_terms: Option<u64>,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            nx: 32,
            ny: 32,
            y_split: 2.0,
            max_terms: None,
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Partial {
    pub value: BigComplex,
    pub quad_err: f64,
    pub trunc_err: f64,
}

/// Terms beyond which `n^(kappa/2 + 2) e^(-2 pi n y0 / w)` drops below
/// `2^-prec` on the domain.
pub(crate) fn useful_terms(width: u32, twice_kappa: u32, prec: u32) -> u64 {
    let a = twice_kappa as f64 / 4.0 + 2.0;
    let b = 2.0 * std::f64::consts::PI * 3f64.sqrt() / 2.0 / width as f64;
    let target = -(prec as f64) * std::f64::consts::LN_2;
    let mut n = 1u64;
    while a * (n as f64).ln() - b * n as f64 > target || (n as f64) < a / b {
        n += 1;
    }
    n
}

/// `int_F f(tau + s) conj(g(tau + s)) y^(kappa - 2) dx dy`.
pub(crate) fn integrate_fd(
    f: &FloatQSeries,
    g: &FloatQSeries,
    twice_kappa: u32,
    shift: i64,
    opts: &QuadOptions,
    prec: u32,
) -> Result<Partial> {
    if f.width() != g.width() {
        return Err(Error::WidthMismatch {
            left: f.width(),
            right: g.width(),
        });
    }
    for s in [f, g] {
        if s.get(0)?.is_some_and(|c| c.abs_f64() > s.err()) {
            return Err(Error::InvalidArgument("inner products need cusp forms".into()));
        }
    }
    let same = f == g;
    let mut n = f.trunc().min(g.trunc());
    n = n.min(opts.max_terms.unwrap_or_else(|| useful_terms(f.width(), twice_kappa, prec)));
    let (f, g) = (f.truncate(n), g.truncate(n));
    let wp = prec + 16;
    let kappa = Float::with_val(wp, twice_kappa) / 2u32;
    let y_split = Float::with_val(wp, opts.y_split);

    let g_eval = if same { None } else { Some(&g) };
    let fine = region_below(&f, g_eval, &kappa, shift, &y_split, opts.nx, opts.ny, wp);
    let coarse = region_below(&f, g_eval, &kappa, shift, &y_split, opts.nx / 2, opts.ny / 2, wp);
    let above = region_above(&f, &g, &kappa, shift, &y_split, wp);
    let quad_err = up(fine.sub_ref(&coarse).abs_f64());
    let value = fine.add_ref(&above);
    let rounding = value.abs_f64().max(above.abs_f64()) * unit(wp) * (n as f64 + 64.0);
    let trunc_err = up(truncation_bound(&f, &g, twice_kappa as f64 / 2.0) + rounding);
    Ok(Partial {
        value: value.with_prec(prec),
        quad_err,
        trunc_err,
    })
}

#[allow(clippy::too_many_arguments)]
fn region_below(
    f: &FloatQSeries,
    g: Option<&FloatQSeries>,
    kappa: &Float,
    shift: i64,
    y_split: &Float,
    nx: usize,
    ny: usize,
    wp: u32,
) -> BigComplex {
    let rx = gauss_legendre(nx.max(2), wp);
    let ry = gauss_legendre(ny.max(2), wp);
    let exponent = Float::with_val(wp, kappa - 2u32);
    // Each x node contributes its own column; summed in node order.
    // `None` for `g` means `g = f`.
    let columns: Vec<BigComplex> = rx
        .par_iter()
        .map(|(xn, xw)| {
            let x = Float::with_val(wp, xn / 2u32);
            let lo = (Float::with_val(wp, 1) - Float::with_val(wp, x.square_ref())).sqrt();
            let half_len = Float::with_val(wp, y_split - &lo) / 2u32;
            let mid = Float::with_val(wp, y_split + &lo) / 2u32;
            let xs = Float::with_val(wp, &x + shift);
            let mut col = BigComplex::zero(wp);
            for (yn, yw) in ry.iter() {
                let y = Float::with_val(wp, &mid + Float::with_val(wp, &half_len * yn));
                let fv = f.eval(&xs, &y);
                let gv = g.map(|g| g.eval(&xs, &y));
                let gv = gv.as_ref().unwrap_or(&fv);
                let w = Float::with_val(wp, yw * Float::with_val(wp, (&y).pow(&exponent)));
                col.add_assign_ref(&fv.mul_conj(gv).mul_float(&w));
            }
            // dx = dxn / 2, dy = half_len dyn
            col.mul_float(&Float::with_val(wp, &half_len * xw)).mul_float(&Float::with_val(wp, 0.5))
        })
        .collect();
    let mut acc = BigComplex::zero(wp);
    for c in &columns {
        acc.add_assign_ref(c);
    }
    acc
}

/// Termwise integral over `[s - 1/2, s + 1/2] x [Y, inf)`:
/// `sum a(n) conj(b(n')) X(n - n') (2 pi t / w)^-(kappa-1) Gamma(kappa-1, 2 pi t Y / w)`
/// with `t = n + n'` and `X(d) = e(d s / w) sin(pi d / w) / (pi d / w)`.
fn region_above(f: &FloatQSeries, g: &FloatQSeries, kappa: &Float, shift: i64, y_split: &Float, wp: u32) -> BigComplex {
    let w = f.width();
    let pi = Float::with_val(wp, Constant::Pi);
    let s = Float::with_val(wp, kappa - 1u32);
    let mut y_cache: HashMap<u64, Float> = HashMap::new();
    let mut y_int = |t: u64| -> Float {
        y_cache
            .entry(t)
            .or_insert_with(|| {
                let r = Float::with_val(wp, &pi * 2u32) * t / w;
                let x = Float::with_val(wp, &r * y_split);
                let gi = Float::with_val(wp, s.gamma_inc_ref(&x));
                let p = Float::with_val(wp, (&r).pow(&s));
                gi / p
            })
            .clone()
    };
    let mut acc = BigComplex::zero(wp);
    for (n, a) in f.terms() {
        for (m, b) in g.terms() {
            let d = n as i64 - m as i64;
            let x_int = if d == 0 {
                BigComplex::one(wp)
            } else {
                let arg = Float::with_val(wp, &pi * d) / w;
                let sinc = Float::with_val(wp, arg.sin_ref()) / &arg;
                let turns = Float::with_val(wp, d * shift) / w;
                BigComplex::expi_turns(&turns).mul_float(&sinc)
            };
            let term = a.mul_conj(b).mul_ref(&x_int).mul_float(&y_int(n + m));
            acc.add_assign_ref(&term);
        }
    }
    acc
}

/// `int_y0^inf y^a e^-(b (y - y0)) dy = e^(b y0) b^-(a+1) Gamma(a+1, b y0)`.
fn exp_moment(a: f64, b: f64, y0: f64) -> f64 {
    let p = 64;
    let s = Float::with_val(p, a + 1.0);
    let x = Float::with_val(p, b * y0);
    let gi = s.gamma_inc_ref(&x);
    let gi = Float::with_val(p, gi).to_f64();
    (b * y0 - (a + 1.0) * b.ln()).exp() * gi
}

/// Bound on the change of the integral from the unknown tails and the
/// coefficient errors, assuming `|a(n)| <= C n^(kappa/2)` beyond the
/// truncation with `C` ten times the largest observed ratio.
fn truncation_bound(f: &FloatQSeries, g: &FloatQSeries, kappa: f64) -> f64 {
    let w = f.width() as f64;
    let y0 = 3f64.sqrt() / 2.0;
    let n = f.trunc();
    let decay = |k: u64| (-2.0 * std::f64::consts::PI * k as f64 * y0 / w).exp();
    let parts = |s: &FloatQSeries| -> (f64, f64) {
        let c = 10.0
            * s.terms()
                .map(|(k, v)| v.abs_f64() / (k as f64).powf(kappa / 2.0))
                .fold(0.0, f64::max);
        let size: f64 = s.terms().map(|(k, v)| (v.abs_f64() + s.err()) * decay(k)).sum();
        let mut tail = 0.0;
        let mut k = n + 1;
        loop {
            let t = c * (k as f64).powf(kappa / 2.0) * decay(k);
            tail += t;
            if t < tail * 1e-18 || t == 0.0 || k > n + 100_000 {
                break;
            }
            k += 1;
        }
        let noise: f64 = s.err() * (1..=n).map(decay).sum::<f64>();
        (size, tail + noise)
    };
    let (sf, tf) = parts(f);
    let (sg, tg) = parts(g);
    let e = tf * (sg + tg) + sf * tg;
    if e == 0.0 {
        return 0.0;
    }
    e * exp_moment(kappa - 2.0, 4.0 * std::f64::consts::PI / w, y0)
}
