//! Modular forms on `SL2(Z)`.

mod eigen;
mod hecke;

use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::numerics::{bernoulli, divisor_sums};
use crate::qseries::ExactQSeries;

pub use eigen::{eigenforms, hecke_matrix, EigenData, Eigenform};
pub use hecke::{hecke, hecke_float, hecke_to};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceKind {
    Full,
    Cuspidal,
}

/// Echelon basis of `M_k` or `S_k`: element `i` has coefficient 1 at its
/// pivot and 0 at every other pivot.
#[derive(Clone, Debug, PartialEq)]
pub struct SpaceBasis {
    pub k: u32,
    pub kind: SpaceKind,
    pub basis: Vec<ExactQSeries>,
}

impl SpaceBasis {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn pivots(&self) -> Vec<u64> {
        let offset = match self.kind {
            SpaceKind::Full => 0,
            SpaceKind::Cuspidal => 1,
        };
        (0..self.dim() as u64).map(|i| i + offset).collect()
    }

    pub fn trunc(&self) -> u64 {
        self.basis.iter().map(|b| b.trunc()).min().unwrap_or(0)
    }

    /// Coordinates of `f` read at the pivots, together with the largest
    /// coefficient of `f - sum coords_i basis_i`.
    pub fn coordinates(&self, f: &ExactQSeries) -> Result<(Vec<Rational>, Rational)> {
        let coords = self
            .pivots()
            .iter()
            .map(|&p| f.coeff(p))
            .collect::<Result<Vec<_>>>()?;
        let items: Vec<(Rational, &ExactQSeries)> = coords.iter().cloned().zip(self.basis.iter()).collect();
        let trunc = f.trunc().min(self.trunc());
        let mut rest = f.truncate(trunc);
        if !items.is_empty() {
            rest = rest.sub(&ExactQSeries::linear_combination(&items)?.truncate(trunc))?;
        }
        let worst = rest
            .terms()
            .map(|(_, c)| Rational::from(c.abs_ref()))
            .max()
            .unwrap_or_default();
        Ok((coords, worst))
    }
}

pub fn dim_modular(k: u32) -> usize {
    if k % 2 == 1 || k == 2 {
        return 0;
    }
    let base = (k / 12) as usize;
    if k % 12 == 2 {
        base
    } else {
        base + 1
    }
}

pub fn dim_cusp(k: u32) -> usize {
    if k < 12 {
        0
    } else {
        dim_modular(k) - 1
    }
}

fn check_weight(k: u32) -> Result<()> {
    if k < 4 || k % 2 == 1 {
        return Err(Error::InvalidWeight(format!("level-1 weight must be even and >= 4, got {k}")));
    }
    Ok(())
}

/// Integer coefficients `E_k * denominator`, and that denominator.
fn eisenstein_integral(k: u32, trunc: usize) -> (Vec<Integer>, Integer) {
    // E_k = 1 - (2k / B_k) sum sigma_{k-1}(n) q^n
    let factor = Rational::from(-2 * k as i64) / bernoulli(k as usize);
    let (num, den) = factor.into_numer_denom();
    let sig = divisor_sums(k - 1, trunc);
    let mut out: Vec<Integer> = sig.into_iter().map(|s| s * &num).collect();
    out[0] = den.clone();
    (out, den)
}

pub fn eisenstein(k: u32, trunc: u64) -> Result<ExactQSeries> {
    check_weight(k)?;
    let (coeffs, den) = eisenstein_integral(k, trunc as usize);
    Ok(ExactQSeries::from_terms(
        1,
        trunc,
        coeffs
            .into_iter()
            .enumerate()
            .map(|(n, c)| (n as u64, Rational::from((c, den.clone())))),
    ))
}

fn dense_mul(a: &[Integer], b: &[Integer], len: usize) -> Vec<Integer> {
    let mut out = vec![Integer::new(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if *x == 0 {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            out[i + j] += Integer::from(x * y);
        }
    }
    out
}

fn dense_pow(a: &[Integer], e: u32, len: usize) -> Vec<Integer> {
    let mut acc = vec![Integer::new(); len];
    if len > 0 {
        acc[0] = Integer::from(1);
    }
    let mut base = a[..len.min(a.len())].to_vec();
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc = dense_mul(&acc, &base, len);
        }
        e >>= 1;
        if e > 0 {
            base = dense_mul(&base, &base, len);
        }
    }
    acc
}

fn delta_dense(len: usize) -> Vec<Integer> {
    // prod (1 - q^n), then the 24th power, then shift by q.
    let mut eta = vec![Integer::new(); len];
    if len == 0 {
        return eta;
    }
    eta[0] = Integer::from(1);
    for n in 1..len {
        for i in (n..len).rev() {
            let t = eta[i - n].clone();
            eta[i] -= t;
        }
    }
    let p24 = dense_pow(&eta, 24, len);
    let mut out = vec![Integer::new(); len];
    out[1..].clone_from_slice(&p24[..len - 1]);
    out
}

/// `q prod (1 - q^n)^24` to `q^trunc`.
pub fn delta(trunc: u64) -> ExactQSeries {
    ExactQSeries::from_integers(1, trunc, &delta_dense(trunc as usize + 1))
}

/// Victor Miller basis: `Delta^j E4^a E6^b` with `4a + 6b + 12j = k`,
/// reduced to echelon form at the pivots.
pub fn miller_basis(k: u32, kind: SpaceKind, trunc: u64) -> Result<SpaceBasis> {
    check_weight(k)?;
    let d = dim_modular(k);
    let (lo, dim) = match kind {
        SpaceKind::Full => (0, d),
        SpaceKind::Cuspidal => (1, d.saturating_sub(1)),
    };
    if (trunc as usize) < lo + dim {
        return Err(Error::InsufficientTruncation {
            context: "miller_basis",
            needed: (lo + dim) as u64,
            available: trunc,
        });
    }
    let len = trunc as usize + 1;
    // Both have denominator 1.
    let (e4, _) = eisenstein_integral(4, trunc as usize);
    let (e6, _) = eisenstein_integral(6, trunc as usize);
    let dl = delta_dense(len);
    let mut rows: Vec<Vec<Rational>> = Vec::with_capacity(dim);
    for j in lo..lo + dim {
        let w = k - 12 * j as u32;
        let (a, b) = if w % 4 == 0 { (w / 4, 0) } else { ((w - 6) / 4, 1) };
        let mut f = dense_pow(&dl, j as u32, len);
        f = dense_mul(&f, &dense_pow(&e4, a, len), len);
        if b == 1 {
            f = dense_mul(&f, &e6, len);
        }
        rows.push(f.into_iter().map(Rational::from).collect());
    }
    reduce_at_pivots(&mut rows, lo);
    let basis = rows
        .into_iter()
        .map(|r| ExactQSeries::from_terms(1, trunc, r.into_iter().enumerate().map(|(n, c)| (n as u64, c))))
        .collect();
    Ok(SpaceBasis { k, kind, basis })
}

/// Rows `i` have leading term `q^(lo+i)` with coefficient 1; clear every
/// other pivot column.
fn reduce_at_pivots(rows: &mut [Vec<Rational>], lo: usize) {
    let n = rows.len();
    for i in (0..n).rev() {
        let p = lo + i;
        let lead = rows[i][p].clone();
        if lead != 1 {
            for x in rows[i].iter_mut() {
                *x /= &lead;
            }
        }
        let pivot_row = rows[i].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r < i && row[p] != 0 {
                let f = row[p].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    if *y != 0 {
                        *x -= Rational::from(&f * y);
                    }
                }
            }
        }
    }
}

/// Echelon basis of the span of `forms`, with pivots anywhere.
pub fn echelon(forms: &[ExactQSeries], trunc: u64) -> Result<(Vec<ExactQSeries>, Vec<u64>)> {
    let mut rows: Vec<Vec<Rational>> = forms
        .iter()
        .map(|f| f.dense(trunc))
        .collect::<Result<_>>()?;
    let pivots = linalg::rref(&mut rows);
    let basis = rows
        .into_iter()
        .map(|r| ExactQSeries::from_terms(forms[0].width(), trunc, r.into_iter().enumerate().map(|(n, c)| (n as u64, c))))
        .collect();
    Ok((basis, pivots.into_iter().map(|p| p as u64).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(s: &ExactQSeries, upto: u64) -> Vec<i64> {
        (0..=upto).map(|n| s.coeff(n).unwrap().to_f64() as i64).collect()
    }

    #[test]
    fn eisenstein_coefficients() {
        assert_eq!(ints(&eisenstein(4, 3).unwrap(), 3), vec![1, 240, 2160, 6720]);
        assert_eq!(ints(&eisenstein(6, 1).unwrap(), 1), vec![1, -504]);
        assert_eq!(eisenstein(10, 5).unwrap().coeff(0).unwrap(), 1);
        assert!(eisenstein(5, 5).is_err());
        assert!(eisenstein(2, 5).is_err());
    }

    #[test]
    fn delta_coefficients() {
        let d = delta(6);
        assert_eq!(ints(&d, 6), vec![0, 1, -24, 252, -1472, 4830, -6048]);
    }

    #[test]
    fn dimensions() {
        let cases = [(4, 1, 0), (12, 2, 1), (14, 1, 0), (24, 3, 2), (26, 2, 1), (28, 3, 2), (38, 3, 2)];
        for (k, m, s) in cases {
            assert_eq!((dim_modular(k), dim_cusp(k)), (m, s), "k = {k}");
        }
    }

    #[test]
    fn miller_bases() {
        let s12 = miller_basis(12, SpaceKind::Cuspidal, 10).unwrap();
        assert_eq!(s12.basis, vec![delta(10)]);
        let s24 = miller_basis(24, SpaceKind::Cuspidal, 10).unwrap();
        assert_eq!(s24.dim(), 2);
        assert_eq!(s24.pivots(), vec![1, 2]);
        assert_eq!(s24.basis[0].coeff(2).unwrap(), 0);
        assert_eq!(s24.basis[1].coeff(1).unwrap(), 0);
        let m4 = miller_basis(4, SpaceKind::Full, 10).unwrap();
        assert_eq!(m4.basis, vec![eisenstein(4, 10).unwrap()]);
        assert!(miller_basis(24, SpaceKind::Cuspidal, 1).is_err());
    }

    #[test]
    fn products_reexpand_in_bases() {
        let f = eisenstein(4, 30).unwrap().mul(&eisenstein(6, 30).unwrap()).unwrap();
        let m10 = miller_basis(10, SpaceKind::Full, 30).unwrap();
        let (coords, residual) = m10.coordinates(&f).unwrap();
        assert_eq!(coords, vec![Rational::from(1)]);
        assert_eq!(residual, 0);
        let g = delta(30).mul(&eisenstein(4, 30).unwrap()).unwrap();
        assert_eq!(g.valuation(), Some(1));
    }
}
