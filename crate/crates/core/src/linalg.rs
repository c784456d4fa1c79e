//! Small dense linear algebra over `Q` and over big floats.

use rug::{Float, Rational};

use crate::error::{Error, Result};

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(rows: &mut Vec<Vec<Rational>>) -> Vec<usize> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(r, p);
        let inv = Rational::from(rows[r][col].recip_ref());
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row[col] != 0 {
                let f = row[col].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= Rational::from(&f * y);
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

pub fn inverse(m: &[Vec<Rational>]) -> Result<Vec<Vec<Rational>>> {
    let n = m.len();
    let mut aug: Vec<Vec<Rational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| Rational::from(u32::from(i == j))));
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots[n - 1] >= n {
        let rank = pivots.iter().filter(|&&p| p < n).count();
        return Err(Error::RankDeficient { rank, expected: n });
    }
    Ok(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn mat_mul(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut acc = Rational::new();
                    for t in 0..inner {
                        acc += Rational::from(&row[t] * &b[t][j]);
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// Characteristic polynomial `det(x I - M)`, coefficients from degree 0 up,
/// by the Faddeev-LeVerrier recursion.
pub fn charpoly(m: &[Vec<Rational>]) -> Vec<Rational> {
    let n = m.len();
    let mut coeffs = vec![Rational::new(); n + 1];
    coeffs[n] = Rational::from(1);
    let identity: Vec<Vec<Rational>> = (0..n)
        .map(|i| (0..n).map(|j| Rational::from(u32::from(i == j))).collect())
        .collect();
    let mut mk = vec![vec![Rational::new(); n]; n];
    for k in 1..=n {
        // M_k = M M_{k-1} + c_{n-k+1} I
        let prod = mat_mul(m, &mk);
        mk = prod
            .into_iter()
            .zip(&identity)
            .map(|(row, id)| {
                row.into_iter()
                    .zip(id)
                    .map(|(x, e)| x + Rational::from(e * &coeffs[n - k + 1]))
                    .collect()
            })
            .collect();
        let am = mat_mul(m, &mk);
        let trace: Rational = (0..n).map(|i| am[i][i].clone()).sum();
        coeffs[n - k] = -trace / Rational::from(k as u32);
    }
    coeffs
}

/// Null vector of a nearly singular square matrix by Gaussian elimination
/// with full pivoting; the last pivot is treated as zero.
pub fn null_vector(m: &[Vec<Float>], prec: u32) -> Vec<Float> {
    let n = m.len();
    let mut a: Vec<Vec<Float>> = m
        .iter()
        .map(|r| r.iter().map(|x| Float::with_val(prec, x)).collect())
        .collect();
    let mut colperm: Vec<usize> = (0..n).collect();
    for k in 0..n.saturating_sub(1) {
        let (mut bi, mut bj) = (k, k);
        let mut best = Float::new(prec);
        for (i, row) in a.iter().enumerate().skip(k) {
            for (j, x) in row.iter().enumerate().skip(k) {
                let ax = Float::with_val(prec, x.abs_ref());
                if ax > best {
                    best = ax;
                    (bi, bj) = (i, j);
                }
            }
        }
        a.swap(k, bi);
        for row in a.iter_mut() {
            row.swap(k, bj);
        }
        colperm.swap(k, bj);
        for i in k + 1..n {
            if a[k][k].is_zero() {
                break;
            }
            let f = Float::with_val(prec, &a[i][k] / &a[k][k]);
            for j in k..n {
                let t = Float::with_val(prec, &f * &a[k][j]);
                a[i][j] -= t;
            }
        }
    }
    let mut y = vec![Float::new(prec); n];
    y[n - 1] = Float::with_val(prec, 1);
    for k in (0..n.saturating_sub(1)).rev() {
        let mut s = Float::new(prec);
        for j in k + 1..n {
            s += Float::with_val(prec, &a[k][j] * &y[j]);
        }
        y[k] = if a[k][k].is_zero() {
            Float::new(prec)
        } else {
            Float::with_val(prec, -s / &a[k][k])
        };
    }
    let mut v = vec![Float::new(prec); n];
    for (k, &c) in colperm.iter().enumerate() {
        v[c] = y[k].clone();
    }
    v
}
