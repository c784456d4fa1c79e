use rug::{Float, Integer, Rational};

use super::{ExactQSeries, QSeries};
use crate::complex::BigComplex;
use crate::error::{Error, Result};

/// Inflates an `f64` bound to absorb its own rounding.
pub(crate) fn up(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * (1.0 + 1e-12)
    }
}

/// Relative rounding allowance for a handful of operations at `prec` bits.
pub(crate) fn unit(prec: u32) -> f64 {
    2f64.powi(4 - prec as i32)
}

/// q-expansion with arbitrary-precision complex coefficients.
///
/// `err` bounds `|a(n) - stored(n)|` uniformly over `0..=trunc`, including
/// indices that are not stored.
#[derive(Clone, Debug, PartialEq)]
pub struct FloatQSeries {
    series: QSeries<BigComplex>,
    prec: u32,
    err: f64,
}

impl FloatQSeries {
    pub fn zero(width: u32, trunc: u64, prec: u32) -> Self {
        Self {
            series: QSeries::zero(width, trunc),
            prec,
            err: 0.0,
        }
    }

    pub fn from_parts(series: QSeries<BigComplex>, prec: u32, err: f64) -> Self {
        assert!(err >= 0.0 && !err.is_nan(), "error bound must be nonnegative");
        Self { series, prec, err }
    }

    /// Converts an exact series; the error is one unit in the last place
    /// of the largest coefficient.
    pub fn from_exact(exact: &ExactQSeries, prec: u32) -> Self {
        let series = exact.map_coeffs(|_, c| BigComplex::from_rational(prec, c));
        let mut s = Self {
            series,
            prec,
            err: 0.0,
        };
        let inexact = exact
            .terms()
            .any(|(_, c)| Float::with_val(prec, c) != *c);
        if inexact {
            s.err = up(s.max_abs() * 2f64.powi(-(prec as i32)));
        }
        s
    }

    pub fn series(&self) -> &QSeries<BigComplex> {
        &self.series
    }

    pub fn width(&self) -> u32 {
        self.series.width()
    }

    pub fn trunc(&self) -> u64 {
        self.series.trunc()
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn err(&self) -> f64 {
        self.err
    }

    pub fn with_extra_err(mut self, extra: f64) -> Self {
        assert!(extra >= 0.0);
        self.err = up(self.err + extra);
        self
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (u64, &BigComplex)> + '_ {
        self.series.terms()
    }

    pub fn nnz(&self) -> usize {
        self.series.nnz()
    }

    pub fn get(&self, n: u64) -> Result<Option<&BigComplex>> {
        self.series.get(n)
    }

    pub fn coeff(&self, n: u64) -> Result<BigComplex> {
        Ok(self
            .series
            .get(n)?
            .cloned()
            .unwrap_or_else(|| BigComplex::zero(self.prec)))
    }

    /// Largest stored coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.terms().map(|(_, c)| c.abs_f64()).fold(0.0, f64::max)
    }

    /// Sum of stored coefficient moduli.
    pub fn l1(&self) -> f64 {
        up(self.terms().map(|(_, c)| c.abs_f64()).sum())
    }

    /// `sum |a(n)|` bound on the true coefficients.
    fn l1_true(&self) -> f64 {
        up(self.l1() + (self.trunc() as f64 + 1.0) * self.err)
    }

    fn rounding(&self) -> f64 {
        up(self.max_abs() * unit(self.prec))
    }

    pub fn truncate(&self, trunc: u64) -> Self {
        Self {
            series: self.series.truncate(trunc),
            prec: self.prec,
            err: self.err,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let series = self.series.add(&other.series)?;
        let mut out = Self {
            series,
            prec: self.prec.min(other.prec),
            err: 0.0,
        };
        out.err = up(self.err + other.err + out.rounding());
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self {
            series: self.series.neg(),
            prec: self.prec,
            err: self.err,
        }
    }

    /// Scales by `s`, whose own absolute error is at most `s_err`.
    pub fn scale(&self, s: &BigComplex, s_err: f64) -> Self {
        let sa = s.abs_f64();
        let mut out = Self {
            series: self.series.scale(s),
            prec: self.prec,
            err: 0.0,
        };
        let max_true = self.max_abs() + self.err;
        out.err = up(sa * self.err + s_err * max_true + s_err * self.err + out.rounding());
        out
    }

    pub fn scale_float(&self, s: &Float, s_err: f64) -> Self {
        self.scale(&BigComplex::from_real(s.clone()), s_err)
    }

    pub fn scale_rational(&self, s: &Rational) -> Self {
        let sa = s.to_f64().abs();
        let mut out = Self {
            series: self.series.scale_rational(s),
            prec: self.prec,
            err: 0.0,
        };
        out.err = up(sa * self.err + out.rounding());
        out
    }

    pub fn scale_integer(&self, s: &Integer) -> Self {
        self.scale_rational(&Rational::from(s))
    }

    /// Truncated Cauchy product with l1-based error propagation.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let series = self.series.mul(&other.series)?;
        let terms = (series.trunc() + 1) as f64;
        let (la, lb) = (self.l1(), other.l1());
        let err = self.l1_true() * other.err
            + lb * self.err
            + terms * unit(self.prec.min(other.prec)) * la * lb;
        Ok(Self {
            series,
            prec: self.prec.min(other.prec),
            err: up(err),
        })
    }

    pub fn qderiv(&self) -> Self {
        let scale = self.trunc() as f64 / self.width() as f64;
        let mut out = Self {
            series: self.series.qderiv(),
            prec: self.prec,
            err: 0.0,
        };
        out.err = up(self.err * scale + out.rounding());
        out
    }

    pub fn dilate4(&self) -> Self {
        Self {
            series: self.series.dilate4(),
            prec: self.prec,
            err: self.err,
        }
    }

    pub fn widen(&self, factor: u32) -> Self {
        Self {
            series: self.series.widen(factor),
            prec: self.prec,
            err: self.err,
        }
    }

    pub fn u4(&self) -> Self {
        Self {
            series: self.series.u4(),
            prec: self.prec,
            err: self.err,
        }
    }

    /// `sum_i s_i f_i` with the scalars' errors.
    pub fn linear_combination(items: &[(BigComplex, f64, &FloatQSeries)]) -> Result<Self> {
        let (first, rest) = items
            .split_first()
            .ok_or_else(|| Error::InvalidArgument("empty linear combination".into()))?;
        let mut acc = first.2.scale(&first.0, first.1);
        for (s, e, f) in rest {
            acc = acc.add(&f.scale(s, *e))?;
        }
        Ok(acc)
    }

    /// Largest imaginary part among the stored coefficients.
    pub fn max_imag(&self) -> f64 {
        self.terms()
            .map(|(_, c)| c.im.to_f64().abs())
            .fold(0.0, f64::max)
    }

    /// Largest `|a(n) - b(n)|` over common indices, plus both error bounds.
    pub fn distance(&self, other: &ExactQSeries) -> Result<f64> {
        let trunc = self.trunc().min(other.trunc());
        let mut worst: f64 = 0.0;
        for n in 0..=trunc {
            let a = self.coeff(n)?;
            let b = BigComplex::from_rational(self.prec, &other.coeff(n)?);
            worst = worst.max(a.sub_ref(&b).abs_f64());
        }
        Ok(worst)
    }

    /// `sum a(n) e^{2 pi i n tau / w}` at `tau = x + i y`, by Horner's rule
    /// in `e^{2 pi i tau / w}`.
    pub fn eval(&self, x: &Float, y: &Float) -> BigComplex {
        let q = BigComplex::q_power(x, y, self.width());
        let mut acc = BigComplex::zero(self.prec);
        let mut next = self.trunc() + 1;
        for (n, c) in self.terms().rev() {
            acc = acc.mul_ref(&q.powu((next - n) as u32));
            acc.add_assign_ref(c);
            next = n;
        }
        acc.mul_ref(&q.powu(next as u32))
    }

    /// Rounds every coefficient to `prec` bits, widening the error bound.
    pub fn round_to(&self, prec: u32) -> Self {
        let series = self.series.map_coeffs(|_, c| c.with_prec(prec));
        let mut out = Self {
            series,
            prec,
            err: 0.0,
        };
        out.err = up(self.err + out.max_abs() * 2f64.powi(1 - prec as i32));
        out
    }

    /// Wraps a map from index to coefficient.
    pub fn from_terms(
        width: u32,
        trunc: u64,
        prec: u32,
        err: f64,
        terms: impl IntoIterator<Item = (u64, BigComplex)>,
    ) -> Self {
        Self::from_parts(QSeries::from_terms(width, trunc, terms), prec, err)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rat_series(trunc: u64, terms: &[(u64, i64, i64)]) -> ExactQSeries {
        ExactQSeries::from_terms(1, trunc, terms.iter().map(|&(n, p, q)| (n, Rational::from((p, q)))))
    }

    #[test]
    fn conversion_error_is_one_ulp() {
        let a = rat_series(4, &[(0, 1, 3), (2, 5, 7)]);
        let f = FloatQSeries::from_exact(&a, 64);
        assert!(f.err() > 0.0);
        assert!(f.err() <= 2f64.powi(-63));
        let dyadic = rat_series(4, &[(0, 1, 4)]);
        assert_eq!(FloatQSeries::from_exact(&dyadic, 64).err(), 0.0);
    }

    #[test]
    fn coeff_out_of_range() {
        let f = FloatQSeries::zero(1, 3, 64);
        assert!(f.coeff(3).unwrap().is_zero());
        assert!(f.coeff(4).is_err());
    }

    proptest! {
        #[test]
        fn float_ops_stay_within_reported_error(
            a in prop::collection::vec((0u64..12, -50i64..50, 1i64..9), 1..8),
            b in prop::collection::vec((0u64..12, -50i64..50, 1i64..9), 1..8),
        ) {
            let (ea, eb) = (rat_series(11, &a), rat_series(11, &b));
            let prec = 53;
            let (fa, fb) = (FloatQSeries::from_exact(&ea, prec), FloatQSeries::from_exact(&eb, prec));
            let cases = [
                (fa.add(&fb).unwrap(), ea.add(&eb).unwrap()),
                (fa.mul(&fb).unwrap(), ea.mul(&eb).unwrap()),
                (fa.mul(&fb).unwrap().qderiv(), ea.mul(&eb).unwrap().qderiv()),
                (fa.scale_rational(&Rational::from((7, 3))), ea.scale_rational(&Rational::from((7, 3)))),
            ];
            for (float, exact) in cases {
                let d = float.distance(&exact).unwrap();
                prop_assert!(d <= float.err(), "distance {} > err {}", d, float.err());
            }
        }
    }
}
