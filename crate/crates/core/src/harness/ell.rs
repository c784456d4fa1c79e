//! The theta-pairing sums
//! `sum_mu (-4m)^mu C(nu,mu) [Gamma ratio] sum_{n in Z} n^(2nu-2mu) c(4m+n^2) / (4m+n^2)^(k+2nu-1/2)`
//! and the two normalisations built on them.

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Rational};

use crate::complex::BigComplex;
use crate::error::{Error, Result};
use crate::halfint::PlusForm;
use crate::numerics::{binomial, gamma_half, gamma_ratio};
use crate::qseries::{unit, up};
use crate::weight::HalfInt;

/// A value with an absolute error bound.
#[derive(Clone, Debug, PartialEq)]
pub struct Approx {
    pub value: BigComplex,
    pub err: f64,
}

/// `(-4m)^mu C(nu, mu) Gamma(1/2+nu) Gamma(k+nu) / (Gamma(1/2+nu-mu) Gamma(k+mu))`.
fn mu_weights(k: u32, nu: u32, m: u64) -> Result<Vec<Rational>> {
    (0..=nu)
        .map(|mu| {
            let g = gamma_ratio(HalfInt::HALF + nu as i64, HalfInt::HALF + (nu - mu) as i64)?
                * gamma_ratio(HalfInt::int((k + nu) as i64), HalfInt::int((k + mu) as i64))?;
            let p = Rational::from(-4 * m as i64).pow(mu as i32);
            Ok(p * binomial(nu, mu) * g)
        })
        .collect()
}

/// The double sum, over all `n` with `4m + n^2` inside the truncation,
/// with a tail bound from `|c(N)| <= C N^(lam/2)`, `C` ten times the
/// largest ratio seen.
pub fn theta_pairing_sum(g: &PlusForm, k: u32, nu: u32, m: u64, prec: u32) -> Result<Approx> {
    let lam = k + 2 * nu;
    if g.lam != lam {
        return Err(Error::InvalidWeight(format!(
            "form of weight {}+1/2 paired with k = {k}, nu = {nu}",
            g.lam
        )));
    }
    if m == 0 {
        return Err(Error::InvalidArgument("m must be positive".into()));
    }
    let c = g.to_float(prec);
    let trunc = c.trunc();
    if trunc < 4 * m {
        return Err(Error::InsufficientTruncation {
            context: "theta pairing sum",
            needed: 4 * m,
            available: trunc,
        });
    }
    let n_max = ((trunc - 4 * m) as f64).sqrt().floor() as u64;
    let n_max = (0..=n_max + 1).rev().find(|n| 4 * m + n * n <= trunc).unwrap_or(0);
    let wp = prec + 32;
    let weights = mu_weights(k, nu, m)?;

    let mut total = BigComplex::zero(wp);
    let mut noise = 0.0;
    for (mu, w) in weights.iter().enumerate() {
        let pw = 2 * (nu as usize - mu) as u32;
        let mut inner = BigComplex::zero(wp);
        let mut inner_abs = 0.0;
        for n in 0..=n_max {
            // n^0 = 1 also at n = 0.
            if n == 0 && pw > 0 {
                continue;
            }
            let big_n = 4 * m + n * n;
            let cn = c.coeff(big_n)?;
            let denom = Float::with_val(wp, big_n).pow(lam) / Float::with_val(wp, big_n).sqrt();
            let factor = Float::with_val(wp, Float::with_val(wp, n).pow(pw)) / denom;
            let mult = if n == 0 { 1u32 } else { 2 };
            let term = cn.mul_float(&factor).mul_float(&Float::with_val(wp, mult));
            inner_abs += factor.to_f64() * mult as f64;
            inner.add_assign_ref(&term);
        }
        noise += w.to_f64().abs() * inner_abs * c.err();
        total.add_assign_ref(&inner.mul_rational(w));
    }

    let growth = 10.0
        * c.terms()
            .filter(|(n, _)| *n > 0)
            .map(|(n, v)| v.abs_f64() / (n as f64).powf(lam as f64 / 2.0))
            .fold(0.0, f64::max);
    // |n| > n_max: n^(2nu-2mu) (4m+n^2)^(lam/2 - lam - 1/2) <= n^(-k-1).
    let tail_n = if k > 0 && n_max > 0 {
        2.0 * (n_max as f64).powf(-(k as f64)) / k as f64
    } else {
        f64::INFINITY
    };
    let tail: f64 = weights.iter().map(|w| w.to_f64().abs()).sum::<f64>() * growth * tail_n;
    let rounding = total.abs_f64() * unit(wp) * (n_max as f64 + 8.0) * (nu as f64 + 1.0);
    Ok(Approx {
        value: total.with_prec(prec),
        err: up(tail + noise + rounding),
    })
}

fn scaled(a: Approx, s: Float, prec: u32) -> Approx {
    let sf = s.to_f64().abs();
    let value = a.value.mul_float(&s).with_prec(prec);
    let err = up(a.err * sf + value.abs_f64() * unit(prec) * 8.0);
    Approx { value, err }
}

/// `l_nu(g, m) = Gamma(k+2nu-1/2) / (4 (4 pi)^(2nu+1/2) Gamma(k-1))` times the sum.
pub fn ell_nu(g: &PlusForm, k: u32, nu: u32, m: u64, prec: u32) -> Result<Approx> {
    let wp = prec + 32;
    let s = theta_pairing_sum(g, k, nu, m, prec)?;
    let num = gamma_half(HalfInt::from_twice(2 * (k + 2 * nu) as i64 - 1))?.to_float(wp);
    let four_pi = Float::with_val(wp, Constant::Pi) * 4u32;
    let p = Float::with_val(wp, &four_pi).pow(2 * nu) * four_pi.sqrt() * 4u32;
    let gk = Float::with_val(wp, &crate::numerics::factorial(k - 2));
    Ok(scaled(s, num / p / gk, prec))
}

/// `Gamma(k+2nu-1/2) / (2^(2k+4nu+1) pi^(k+2nu-1/2))` times the sum.
pub fn prop23_rhs(g: &PlusForm, k: u32, nu: u32, m: u64, prec: u32) -> Result<Approx> {
    let wp = prec + 32;
    let s = theta_pairing_sum(g, k, nu, m, prec)?;
    let num = gamma_half(HalfInt::from_twice(2 * (k + 2 * nu) as i64 - 1))?.to_float(wp);
    let pi = Float::with_val(wp, Constant::Pi);
    let pi_pow = Float::with_val(wp, (&pi).pow(k + 2 * nu)) / pi.sqrt();
    let two = Float::with_val(wp, Float::i_exp(1, (2 * k + 4 * nu + 1) as i32));
    Ok(scaled(s, num / two / pi_pow, prec))
}
