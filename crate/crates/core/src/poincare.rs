//! Level-1 Poincaré series
//! `P_{k,m} = sum_{gamma in Gamma_inf \ SL2(Z)} e(m gamma tau) | gamma`,
//! by the Kloosterman-Bessel coefficient formula and by their expansion in
//! Hecke eigenforms.
//!
//! Series are indexed as `(weight, index)` throughout.

use rayon::prelude::*;
use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::complex::BigComplex;
use crate::error::{Error, Result};
use crate::level1::EigenData;
use crate::numerics::{bessel_j, factorial, CosTable, KloostermanUnits};
use crate::qseries::{unit, up, FloatQSeries, QSeries};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoincareMethod {
    Kloosterman,
    Eigen,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PoincareSeries {
    pub k: u32,
    pub m: u64,
    pub coeffs: FloatQSeries,
    pub method: PoincareMethod,
    /// Last modulus summed, for the Kloosterman method.
    pub c_max: Option<u64>,
}

#[derive(Clone, Copy, Debug)]
pub struct KloostermanOptions {
    pub c_max: u64,
    /// Largest acceptable tail bound on any coefficient.
    pub tol: f64,
    /// `c_max` is doubled at most this many times.
    pub max_doublings: u32,
}

impl Default for KloostermanOptions {
    fn default() -> Self {
        Self {
            c_max: 1000,
            tol: 1e-12,
            max_doublings: 5,
        }
    }
}

fn check_km(k: u32, m: u64) -> Result<()> {
    if k < 4 || k % 2 == 1 {
        return Err(Error::InvalidWeight(format!("Poincaré series need even k >= 4, got {k}")));
    }
    if m == 0 {
        return Err(Error::InvalidArgument("Poincaré index must be positive".into()));
    }
    Ok(())
}

/// Bound on `|p(n) - partial sum over c <= c_max|` from `|S(m,n;c)| <= c`
/// and `|J_v(x)| <= (x/2)^v / v!`.
pub fn kloosterman_tail_bound(k: u32, m: u64, n: u64, c_max: u64) -> f64 {
    let v = (k - 1) as f64;
    let two_pi = 2.0 * std::f64::consts::PI;
    let log = two_pi.ln()
        + v / 2.0 * (n as f64 / m as f64).ln()
        + v * (two_pi * ((m * n) as f64).sqrt()).ln()
        - factorial(k - 1).to_f64().ln()
        - (k as f64 - 2.0) * (c_max as f64).ln()
        - (k as f64 - 2.0).ln();
    up(log.exp())
}

pub fn poincare_kloosterman(k: u32, m: u64, n_trunc: u64, prec: u32, c_max: u64) -> Result<PoincareSeries> {
    poincare_kloosterman_with(
        k,
        m,
        n_trunc,
        prec,
        &KloostermanOptions {
            c_max,
            ..Default::default()
        },
    )
}

/// `p(n) = delta_{mn} + 2 pi (-1)^(k/2) (n/m)^((k-1)/2)
///          sum_c S(m,n;c)/c J_{k-1}(4 pi sqrt(mn)/c)` for `1 <= n <= n_trunc`.
pub fn poincare_kloosterman_with(
    k: u32,
    m: u64,
    n_trunc: u64,
    prec: u32,
    opts: &KloostermanOptions,
) -> Result<PoincareSeries> {
    check_km(k, m)?;
    let tail_at = |c: u64| (1..=n_trunc).map(|n| kloosterman_tail_bound(k, m, n, c)).fold(0.0, f64::max);
    let mut c_max = opts.c_max.max(1);
    let mut doublings = 0;
    while tail_at(c_max) > opts.tol {
        if doublings == opts.max_doublings {
            return Err(Error::TailBound {
                context: format!("P_{{{k},{m}}} at c_max = {c_max}"),
                bound: tail_at(c_max),
                tol: opts.tol,
            });
        }
        c_max *= 2;
        doublings += 1;
    }

    let wp = prec + 32;
    let four_pi = Float::with_val(wp, Constant::Pi) * 4u32;
    let sqrt_mn: Vec<Float> = (1..=n_trunc).map(|n| Float::with_val(wp, m * n).sqrt()).collect();

    // Per modulus: (S/c) J for every n, with its error.
    let per_c: Vec<Vec<(Float, f64)>> = (1..=c_max)
        .into_par_iter()
        .map(|c| -> Result<Vec<(Float, f64)>> {
            let units = KloostermanUnits::new(c);
            let table = CosTable::new(c, wp);
            let mut row = Vec::with_capacity(n_trunc as usize);
            for (i, n) in (1..=n_trunc).enumerate() {
                let s = units.sum(m as i64, n as i64, &table);
                let x = Float::with_val(wp, &four_pi * &sqrt_mn[i]) / c;
                let j = bessel_j(k - 1, &x, wp)?;
                let term = Float::with_val(wp, &s * &j.mid) / c;
                let s_err = (c as f64) * unit(wp) * 4.0;
                let err = (s.to_f64().abs() * j.rad + j.mid.to_f64().abs() * s_err) / c as f64
                    + term.to_f64().abs() * unit(wp) * 2.0;
                row.push((term, err));
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;

    let two_pi = Float::with_val(wp, Constant::Pi) * 2u32;
    let sign = if (k / 2) % 2 == 1 { -1i32 } else { 1 };
    let mut terms = Vec::with_capacity(n_trunc as usize);
    let mut err: f64 = 0.0;
    for (i, n) in (1..=n_trunc).enumerate() {
        let mut acc = Float::new(wp);
        let mut e = 0.0;
        for row in &per_c {
            acc += &row[i].0;
            e += row[i].1;
        }
        e += per_c.len() as f64 * acc.to_f64().abs().max(1.0) * unit(wp);
        let ratio = Float::with_val(wp, n) / m;
        let scale = Float::with_val(wp, ratio.sqrt()).pow(k - 1) * &two_pi * sign;
        let scale_f = scale.to_f64().abs();
        let mut value = Float::with_val(wp, &acc * &scale);
        if n == m {
            value += 1u32;
        }
        let total = up(scale_f * e + kloosterman_tail_bound(k, m, n, c_max) + value.to_f64().abs() * unit(prec) * 4.0);
        err = err.max(total);
        terms.push((n, BigComplex::from_real(Float::with_val(prec, &value))));
    }
    let coeffs = FloatQSeries::from_parts(QSeries::from_terms(1, n_trunc, terms), prec, err);
    Ok(PoincareSeries {
        k,
        m,
        coeffs,
        method: PoincareMethod::Kloosterman,
        c_max: Some(c_max),
    })
}

/// `Gamma(k-1) / (4 pi m)^(k-1)` with its absolute error.
fn unfold_constant(k: u32, m: u64, prec: u32) -> (Float, f64) {
    let wp = prec + 16;
    let g = Float::with_val(wp, &factorial(k - 2));
    let base = Float::with_val(wp, Constant::Pi) * 4u32 * m;
    let v = g / base.pow(k - 1);
    let err = v.to_f64() * unit(wp) * (k as f64 + 4.0);
    (Float::with_val(prec, v), err)
}

/// `P_{k,m} = Gamma(k-1)/(4 pi m)^(k-1) sum_j a_j(m) / <f_j, f_j> f_j`.
pub fn poincare_eigen(k: u32, m: u64, n_trunc: u64, eig: &EigenData, prec: u32) -> Result<PoincareSeries> {
    check_km(k, m)?;
    if eig.k != k {
        return Err(Error::InvalidWeight(format!("eigenforms of weight {} for P of weight {k}", eig.k)));
    }
    let norms = eig.norms()?;
    let (pref, pref_err) = unfold_constant(k, m, prec);
    let pref_c = BigComplex::from_real(pref.clone());
    let mut acc = FloatQSeries::zero(1, n_trunc, prec);
    for (f, norm) in eig.eigs.iter().zip(norms) {
        if f.series.trunc() < n_trunc.max(m) {
            return Err(Error::InsufficientTruncation {
                context: "poincare_eigen",
                needed: n_trunc.max(m),
                available: f.series.trunc(),
            });
        }
        let am = f.series.coeff(m)?;
        let nm = norm.mid.to_f64();
        if norm.rad >= nm {
            return Err(Error::Precision(format!("norm {nm:e} not resolved (radius {:e})", norm.rad)));
        }
        let inv = BigComplex::from_real(Float::with_val(prec, 1) / &norm.mid);
        let c = am.mul_ref(&inv).mul_ref(&pref_c);
        let (a, p) = (am.abs_f64(), pref.to_f64());
        let c_err = p * a * norm.rad / (nm * (nm - norm.rad))
            + p * f.series.err() / nm
            + pref_err * a / nm
            + c.abs_f64() * unit(prec) * 8.0;
        acc = acc.add(&f.series.truncate(n_trunc).scale(&c, c_err))?;
    }
    Ok(PoincareSeries {
        k,
        m,
        coeffs: acc,
        method: PoincareMethod::Eigen,
        c_max: None,
    })
}

/// `<h, P_{k,m}> = Gamma(k-1) w^k / ((4 pi m)^(k-1) index) * c(m)` for a
/// cusp form `h` with `m`-th coefficient `c(m)`, on a group of the given
/// index in `SL2(Z)` with cusp width `w`.
pub fn unfold_pairing(c_m: &BigComplex, k: u32, m: u64, index: u64, w: u32, prec: u32) -> BigComplex {
    let (pref, _) = unfold_constant(k, m, prec);
    let wk = Float::with_val(prec, w).pow(k);
    let s = Float::with_val(prec, pref * wk) / index;
    c_m.mul_float(&s)
}
