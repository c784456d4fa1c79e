use rug::ops::Pow;
use rug::Integer;

use crate::error::{Error, Result};
use crate::numerics::{divisors, gcd};
use crate::qseries::{up, unit, Coefficient, FloatQSeries, QSeries};

/// `T_m f` to the largest `N` with `m N <= trunc(f)`.
pub fn hecke<C: Coefficient>(k: u32, m: u64, f: &QSeries<C>) -> Result<QSeries<C>> {
    hecke_to(k, m, f, f.trunc() / m)
}

/// `a_{T_m f}(n) = sum_{d | (m, n)} d^(k-1) a(m n / d^2)` for `n <= n_out`.
pub fn hecke_to<C: Coefficient>(k: u32, m: u64, f: &QSeries<C>, n_out: u64) -> Result<QSeries<C>> {
    if m == 0 {
        return Err(Error::InvalidArgument("Hecke index must be positive".into()));
    }
    if f.width() != 1 {
        return Err(Error::WidthMismatch { left: f.width(), right: 1 });
    }
    let needed = m * n_out;
    if f.trunc() < needed {
        return Err(Error::InsufficientTruncation {
            context: "hecke",
            needed,
            available: f.trunc(),
        });
    }
    let powers: Vec<(u64, Integer)> = divisors(m)
        .into_iter()
        .map(|d| (d, Integer::from(d).pow(k - 1)))
        .collect();
    let mut out = QSeries::zero(1, n_out);
    for n in 0..=n_out {
        let g = if n == 0 { m } else { gcd(m, n) };
        let mut acc: Option<C> = None;
        for (d, p) in powers.iter().filter(|(d, _)| g % d == 0) {
            if let Some(a) = f.get(m * n / (d * d))? {
                let t = a.times_integer(p);
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

/// [`hecke`] on a float series, propagating the error bound.
pub fn hecke_float(k: u32, m: u64, f: &FloatQSeries) -> Result<FloatQSeries> {
    let series = hecke(k, m, f.series())?;
    let sigma: f64 = divisors(m).iter().map(|&d| (d as f64).powi(k as i32 - 1)).sum();
    let max_out = series.terms().map(|(_, c)| c.abs_f64()).fold(0.0, f64::max);
    let err = up(f.err() * sigma + max_out * unit(f.prec()) * divisors(m).len() as f64);
    Ok(FloatQSeries::from_parts(series, f.prec(), err))
}
