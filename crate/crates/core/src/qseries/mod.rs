//! Truncated q-expansions on an exponent lattice `(1/w)Z`.
//!
//! A series `sum_n a(n) e^{2 pi i n tau / w}` is stored sparsely by the
//! numerator `n` of its exponent. `trunc` is the highest numerator whose
//! coefficient is known; absent indices at or below it are zero. Every
//! operation reports the smallest truncation justified by its operands.

mod expansion;
mod float;
pub(crate) use float::{unit, up};
mod serial;

use std::collections::BTreeMap;

use rug::{Integer, Rational};

use crate::complex::BigComplex;
use crate::error::{Error, Result};

pub use expansion::Expansion;
pub use float::FloatQSeries;
pub use serial::SeriesRecord;
pub(crate) use serial::{float_from_str, float_to_string};

/// Coefficient ring for [`QSeries`].
pub trait Coefficient: Clone + std::fmt::Debug + Send + Sync {
    fn is_zero(&self) -> bool;
    fn add_assign_ref(&mut self, other: &Self);
    fn sub_assign_ref(&mut self, other: &Self);
    fn negated(&self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn times_rational(&self, r: &Rational) -> Self;
    fn times_integer(&self, r: &Integer) -> Self;
}

impl Coefficient for Rational {
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }
    fn sub_assign_ref(&mut self, other: &Self) {
        *self -= other;
    }
    fn negated(&self) -> Self {
        Rational::from(-self)
    }
    fn times(&self, other: &Self) -> Self {
        Rational::from(self * other)
    }
    fn times_rational(&self, r: &Rational) -> Self {
        Rational::from(self * r)
    }
    fn times_integer(&self, r: &Integer) -> Self {
        Rational::from(self * r)
    }
}

impl Coefficient for BigComplex {
    fn is_zero(&self) -> bool {
        BigComplex::is_zero(self)
    }
    fn add_assign_ref(&mut self, other: &Self) {
        BigComplex::add_assign_ref(self, other)
    }
    fn sub_assign_ref(&mut self, other: &Self) {
        BigComplex::sub_assign_ref(self, other)
    }
    fn negated(&self) -> Self {
        self.neg()
    }
    fn times(&self, other: &Self) -> Self {
        self.mul_ref(other)
    }
    fn times_rational(&self, r: &Rational) -> Self {
        self.mul_rational(r)
    }
    fn times_integer(&self, r: &Integer) -> Self {
        self.mul_integer(r)
    }
}

/// Truncated q-expansion with coefficients in `C`.
#[derive(Clone, Debug, PartialEq)]
pub struct QSeries<C> {
    width: u32,
    trunc: u64,
    coeffs: BTreeMap<u64, C>,
}

/// Exact rational q-expansion.
pub type ExactQSeries = QSeries<Rational>;

fn check_width(a: u32, b: u32) -> Result<()> {
    if a != b {
        return Err(Error::WidthMismatch { left: a, right: b });
    }
    Ok(())
}

impl<C: Coefficient> QSeries<C> {
    pub fn zero(width: u32, trunc: u64) -> Self {
        assert!(width > 0, "exponent lattice width must be positive");
        Self {
            width,
            trunc,
            coeffs: BTreeMap::new(),
        }
    }

    /// Builds a series from `(index, coefficient)` pairs; zero entries and
    /// entries beyond `trunc` are dropped, repeated indices are summed.
    pub fn from_terms(width: u32, trunc: u64, terms: impl IntoIterator<Item = (u64, C)>) -> Self {
        let mut s = Self::zero(width, trunc);
        for (n, c) in terms {
            s.add_term(n, c);
        }
        s.prune();
        s
    }

    pub(crate) fn add_term(&mut self, n: u64, c: C) {
        if n > self.trunc {
            return;
        }
        match self.coeffs.get_mut(&n) {
            Some(slot) => slot.add_assign_ref(&c),
            None => {
                self.coeffs.insert(n, c);
            }
        }
    }

    pub(crate) fn prune(&mut self) {
        self.coeffs.retain(|_, c| !c.is_zero());
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn trunc(&self) -> u64 {
        self.trunc
    }

    /// Nonzero stored terms in increasing index order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (u64, &C)> + '_ {
        self.coeffs.iter().map(|(n, c)| (*n, c))
    }

    pub fn nnz(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Stored coefficient at `n`, `None` meaning zero.
    ///
    /// Asking beyond the truncation is an error, never a silent zero.
    pub fn get(&self, n: u64) -> Result<Option<&C>> {
        if n > self.trunc {
            return Err(Error::OutOfRange {
                index: n,
                trunc: self.trunc,
            });
        }
        Ok(self.coeffs.get(&n))
    }

    /// Lowest index with a nonzero coefficient.
    pub fn valuation(&self) -> Option<u64> {
        self.coeffs.keys().next().copied()
    }

    pub fn truncate(&self, trunc: u64) -> Self {
        let trunc = trunc.min(self.trunc);
        Self {
            width: self.width,
            trunc,
            coeffs: self.coeffs.range(..=trunc).map(|(n, c)| (*n, c.clone())).collect(),
        }
    }

    pub fn map_coeffs<D: Coefficient>(&self, mut f: impl FnMut(u64, &C) -> D) -> QSeries<D> {
        let mut out = QSeries::zero(self.width, self.trunc);
        for (n, c) in self.terms() {
            let d = f(n, c);
            if !d.is_zero() {
                out.coeffs.insert(n, d);
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_width(self.width, other.width)?;
        let mut out = self.truncate(self.trunc.min(other.trunc));
        for (n, c) in other.coeffs.range(..=out.trunc) {
            out.add_term(*n, c.clone());
        }
        out.prune();
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_width(self.width, other.width)?;
        let mut out = self.truncate(self.trunc.min(other.trunc));
        for (n, c) in other.coeffs.range(..=out.trunc) {
            out.add_term(*n, c.negated());
        }
        out.prune();
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|_, c| c.negated())
    }

    pub fn scale(&self, s: &C) -> Self {
        self.map_coeffs(|_, c| c.times(s))
    }

    pub fn scale_rational(&self, s: &Rational) -> Self {
        self.map_coeffs(|_, c| c.times_rational(s))
    }

    pub fn scale_integer(&self, s: &Integer) -> Self {
        self.map_coeffs(|_, c| c.times_integer(s))
    }

    /// Truncated Cauchy product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        check_width(self.width, other.width)?;
        let trunc = self.trunc.min(other.trunc);
        let mut acc: Vec<Option<C>> = vec![None; trunc as usize + 1];
        for (i, a) in self.coeffs.range(..=trunc) {
            for (j, b) in other.coeffs.range(..=trunc - i) {
                let t = a.times(b);
                match &mut acc[(i + j) as usize] {
                    Some(slot) => slot.add_assign_ref(&t),
                    slot @ None => *slot = Some(t),
                }
            }
        }
        let coeffs = acc
            .into_iter()
            .enumerate()
            .filter_map(|(n, c)| c.filter(|c| !c.is_zero()).map(|c| (n as u64, c)))
            .collect();
        Ok(Self {
            width: self.width,
            trunc,
            coeffs,
        })
    }

    /// `(2 pi i)^{-1} d/dtau`: the coefficient at `n` is multiplied by `n/w`.
    pub fn qderiv(&self) -> Self {
        let w = self.width;
        self.map_coeffs(|n, c| c.times_rational(&Rational::from((n, w))))
    }

    /// `f(tau) -> f(factor * tau)` on an integral lattice.
    pub fn dilate(&self, factor: u64) -> Self {
        Self {
            width: self.width,
            trunc: self.trunc * factor,
            coeffs: self.coeffs.iter().map(|(n, c)| (n * factor, c.clone())).collect(),
        }
    }

    /// `f(tau) -> f(4 tau)`.
    pub fn dilate4(&self) -> Self {
        self.dilate(4)
    }

    /// Re-expresses the series on the finer lattice `(1/(factor w))Z`.
    pub fn widen(&self, factor: u32) -> Self {
        Self {
            width: self.width * factor,
            trunc: self.trunc * factor as u64,
            coeffs: self
                .coeffs
                .iter()
                .map(|(n, c)| (n * factor as u64, c.clone()))
                .collect(),
        }
    }

    /// `sum c(n) q^n -> sum c(4n) q^n`.
    pub fn u4(&self) -> Self {
        Self {
            width: self.width,
            trunc: self.trunc / 4,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(n, _)| *n % 4 == 0)
                .map(|(n, c)| (n / 4, c.clone()))
                .collect(),
        }
    }

    /// `sum_i s_i f_i` over series of a common width.
    pub fn linear_combination(items: &[(C, &Self)]) -> Result<Self> {
        let (first, rest) = items
            .split_first()
            .ok_or_else(|| Error::InvalidArgument("empty linear combination".into()))?;
        let mut acc = first.1.scale(&first.0);
        for (s, f) in rest {
            acc = acc.add(&f.scale(s))?;
        }
        Ok(acc)
    }
}

impl ExactQSeries {
    pub fn one(width: u32, trunc: u64) -> Self {
        Self::monomial(width, trunc, 0, Rational::from(1))
    }

    pub fn monomial(width: u32, trunc: u64, n: u64, c: Rational) -> Self {
        Self::from_terms(width, trunc, [(n, c)])
    }

    /// Dense integer coefficients `a[0], a[1], ...` up to `trunc`.
    pub fn from_integers(width: u32, trunc: u64, dense: &[Integer]) -> Self {
        Self::from_terms(
            width,
            trunc,
            dense
                .iter()
                .enumerate()
                .take(trunc as usize + 1)
                .map(|(n, a)| (n as u64, Rational::from(a))),
        )
    }

    /// Coefficient at `n`; zero if absent, an error beyond `trunc`.
    pub fn coeff(&self, n: u64) -> Result<Rational> {
        Ok(self.get(n)?.cloned().unwrap_or_default())
    }

    /// Dense coefficients `0..=upto`.
    pub fn dense(&self, upto: u64) -> Result<Vec<Rational>> {
        (0..=upto).map(|n| self.coeff(n)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ex(width: u32, trunc: u64, terms: &[(u64, i64)]) -> ExactQSeries {
        ExactQSeries::from_terms(width, trunc, terms.iter().map(|&(n, c)| (n, Rational::from(c))))
    }

    fn theta(n: u64) -> ExactQSeries {
        let mut terms = vec![(0, 1)];
        let mut r = 1u64;
        while r * r <= n {
            terms.push((r * r, 2));
            r += 1;
        }
        ex(1, n, &terms)
    }

    #[test]
    fn add_examples() {
        let a = ex(1, 5, &[(0, 1), (1, 2)]);
        let b = ex(1, 5, &[(1, 3)]);
        assert_eq!(a.add(&b).unwrap(), ex(1, 5, &[(0, 1), (1, 5)]));
        assert_eq!(a.add(&ExactQSeries::zero(1, 5)).unwrap(), a);
        let t = theta(30);
        assert!(t.add(&t.neg()).unwrap().is_zero());
    }

    #[test]
    fn add_takes_min_trunc_and_checks_width() {
        let a = ex(1, 10, &[(7, 1)]);
        let b = ex(1, 5, &[(1, 1)]);
        let s = a.add(&b).unwrap();
        assert_eq!(s.trunc(), 5);
        assert!(s.coeff(7).is_err());
        let c = ex(4, 10, &[(1, 1)]);
        assert!(matches!(a.add(&c), Err(Error::WidthMismatch { .. })));
        assert!(a.mul(&c).is_err());
    }

    #[test]
    fn mul_examples() {
        let a = ex(1, 4, &[(0, 1), (1, 1)]);
        let b = ex(1, 4, &[(0, 1), (1, -1)]);
        assert_eq!(a.mul(&b).unwrap(), ex(1, 4, &[(0, 1), (2, -1)]));
        // r_2(n) for n <= 4 by enumeration of x^2 + y^2 = n.
        let t = theta(4);
        let sq = t.mul(&t).unwrap();
        let r2: Vec<i64> = (0..=4i64)
            .map(|n| {
                let mut count = 0;
                for x in -2i64..=2 {
                    for y in -2i64..=2 {
                        if x * x + y * y == n {
                            count += 1;
                        }
                    }
                }
                count
            })
            .collect();
        assert_eq!(r2, vec![1, 4, 4, 0, 4]);
        for n in 0..=4 {
            assert_eq!(sq.coeff(n).unwrap(), r2[n as usize]);
        }
    }

    #[test]
    fn qderiv_examples() {
        assert!(ExactQSeries::one(1, 5).qderiv().is_zero());
        let q = ex(1, 5, &[(1, 1)]);
        assert_eq!(q.qderiv(), q);
        let q3 = ex(4, 5, &[(3, 1)]);
        assert_eq!(q3.qderiv().coeff(3).unwrap(), Rational::from((3, 4)));
    }

    #[test]
    fn dilate4_examples() {
        let q = ex(1, 5, &[(1, 1)]);
        let d = q.dilate4();
        assert_eq!(d.trunc(), 20);
        assert_eq!(d.coeff(4).unwrap(), 1);
        assert_eq!(d.coeff(1).unwrap(), 0);
        assert_eq!(ExactQSeries::one(1, 5).dilate4(), ExactQSeries::one(1, 20));
    }

    #[test]
    fn coeff_range_and_theta_values() {
        let t = theta(10);
        assert_eq!(t.coeff(4).unwrap(), 2);
        assert_eq!(t.coeff(3).unwrap(), 0);
        assert!(matches!(t.coeff(11), Err(Error::OutOfRange { index: 11, trunc: 10 })));
    }

    #[test]
    fn u4_and_widen() {
        let t = theta(40);
        assert_eq!(t.u4(), theta(10));
        assert!(ex(1, 8, &[(2, 1)]).u4().is_zero());
        let w = ex(1, 3, &[(1, 5)]).widen(4);
        assert_eq!(w.width(), 4);
        assert_eq!(w.trunc(), 12);
        assert_eq!(w.coeff(4).unwrap(), 5);
    }

    fn arb_series(width: u32) -> impl Strategy<Value = ExactQSeries> {
        (8u64..16, prop::collection::vec((0u64..16, -20i64..20, 1i64..5), 0..8)).prop_map(move |(trunc, terms)| {
            ExactQSeries::from_terms(width, trunc, terms.into_iter().map(|(n, p, q)| (n, Rational::from((p, q)))))
        })
    }

    proptest! {
        #[test]
        fn ring_laws(a in arb_series(1), b in arb_series(1), c in arb_series(1)) {
            prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
            prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
            prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
            let lhs = a.mul(&b.add(&c).unwrap()).unwrap();
            let rhs = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn leibniz(a in arb_series(4), b in arb_series(4)) {
            let lhs = a.mul(&b).unwrap().qderiv();
            let rhs = a.qderiv().mul(&b).unwrap().add(&a.mul(&b.qderiv()).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn dilate4_moves_coefficients(a in arb_series(1)) {
            let d = a.dilate4();
            for m in 0..=d.trunc() {
                let expect = if m % 4 == 0 { a.coeff(m / 4).unwrap() } else { Rational::new() };
                prop_assert_eq!(d.coeff(m).unwrap(), expect);
            }
        }
    }
}
