//! The first Shimura lift `sum c(n) q^n -> sum_n (sum_{d|n} d^(lam-1) c(n^2/d^2)) q^n`
//! from weight `lam + 1/2` to weight `2 lam`.

use rug::ops::Pow;
use rug::Integer;

use crate::error::{Error, Result};
use crate::halfint::PlusForm;
use crate::numerics::divisors;
use crate::qseries::{unit, up, Coefficient, Expansion, FloatQSeries, QSeries};

/// Lift of a coefficient sequence to `q^n_out`; needs `c` up to `n_out^2`.
pub fn shimura1_series<C: Coefficient>(c: &QSeries<C>, lam: u32, n_out: u64) -> Result<QSeries<C>> {
    if lam == 0 {
        return Err(Error::InvalidWeight("the lift needs lam >= 1".into()));
    }
    let needed = n_out * n_out;
    if c.trunc() < needed {
        return Err(Error::InsufficientTruncation {
            context: "shimura1",
            needed,
            available: c.trunc(),
        });
    }
    if c.get(0)?.is_some() {
        return Err(Error::InvalidArgument("the lift is defined here for cusp forms (c(0) = 0)".into()));
    }
    let mut out = QSeries::zero(1, n_out);
    for n in 1..=n_out {
        let mut acc: Option<C> = None;
        for d in divisors(n) {
            let m = (n / d) * (n / d);
            if let Some(a) = c.get(m)? {
                let t = a.times_integer(&Integer::from(d).pow(lam - 1));
                match acc.as_mut() {
                    Some(s) => s.add_assign_ref(&t),
                    None => acc = Some(t),
                }
            }
        }
        if let Some(s) = acc {
            out.add_term(n, s);
        }
    }
    Ok(out)
}

pub fn shimura1_float(c: &FloatQSeries, lam: u32, n_out: u64) -> Result<FloatQSeries> {
    let series = shimura1_series(c.series(), lam, n_out)?;
    let sigma = (1..=n_out)
        .map(|n| divisors(n).iter().map(|&d| (d as f64).powi(lam as i32 - 1)).sum::<f64>())
        .fold(0.0, f64::max);
    let max_out = series.terms().map(|(_, v)| v.abs_f64()).fold(0.0, f64::max);
    let err = up(c.err() * sigma + max_out * unit(c.prec()) * 8.0);
    Ok(FloatQSeries::from_parts(series, c.prec(), err))
}

/// `S_1(g)` to `q^n_out`, exact when `g` is.
pub fn shimura1(g: &PlusForm, n_out: u64) -> Result<Expansion> {
    match &g.series {
        Expansion::Exact(s) => Ok(Expansion::Exact(shimura1_series(s, g.lam, n_out)?)),
        Expansion::Float(s) => Ok(Expansion::Float(shimura1_float(s, g.lam, n_out)?)),
    }
}
