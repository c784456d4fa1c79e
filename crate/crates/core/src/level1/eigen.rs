use std::cmp::Ordering;

use rug::{Float, Rational};

use super::{dim_cusp, miller_basis, SpaceBasis, SpaceKind};
use crate::complex::BigComplex;
use crate::error::{Error, Result};
use crate::linalg::{charpoly, null_vector};
use crate::numerics::Ball;
use crate::qseries::{ExactQSeries, FloatQSeries};

/// A normalised Hecke eigenform `a(1) = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Eigenform {
    pub series: FloatQSeries,
    /// Present when the eigenform is rational (one-dimensional spaces).
    pub exact: Option<ExactQSeries>,
    pub lambda2: Float,
    pub lambda3: Float,
    pub norm: Option<Ball>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EigenData {
    pub k: u32,
    pub eigs: Vec<Eigenform>,
}

impl EigenData {
    pub fn dim(&self) -> usize {
        self.eigs.len()
    }

    pub fn set_norms(&mut self, norms: Vec<Ball>) -> Result<()> {
        if norms.len() != self.eigs.len() {
            return Err(Error::InvalidArgument(format!(
                "{} norms for {} eigenforms",
                norms.len(),
                self.eigs.len()
            )));
        }
        for (e, n) in self.eigs.iter_mut().zip(norms) {
            e.norm = Some(n);
        }
        Ok(())
    }

    pub fn norms(&self) -> Result<Vec<&Ball>> {
        self.eigs
            .iter()
            .map(|e| e.norm.as_ref().ok_or(Error::MissingNorms(self.k)))
            .collect()
    }
}

/// Matrix of `T_m` on an echelon basis: column `i` holds the coordinates
/// of `T_m b_i`, read at the pivots.
pub fn hecke_matrix(basis: &SpaceBasis, m: u64) -> Result<Vec<Vec<Rational>>> {
    let pivots = basis.pivots();
    let top = pivots.last().copied().unwrap_or(0);
    let images = basis
        .basis
        .iter()
        .map(|b| super::hecke_to(basis.k, m, b, top))
        .collect::<Result<Vec<_>>>()?;
    Ok(pivots
        .iter()
        .map(|&p| images.iter().map(|img| img.coeff(p)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?)
}

fn trim(p: &mut Vec<Rational>) {
    while p.len() > 1 && *p.last().unwrap() == 0 {
        p.pop();
    }
}

fn derivative(p: &[Rational]) -> Vec<Rational> {
    let mut d: Vec<Rational> = p
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| Rational::from(c * i as u32))
        .collect();
    if d.is_empty() {
        d.push(Rational::new());
    }
    d
}

fn poly_rem(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let lead = b[db].clone();
    while r.len() > db && !(r.len() == 1 && r[0] == 0) {
        let shift = r.len() - 1 - db;
        let f = Rational::from(r.last().unwrap() / &lead);
        for (i, c) in b.iter().enumerate() {
            r[shift + i] -= Rational::from(&f * c);
        }
        r.pop();
        trim(&mut r);
    }
    r
}

fn is_zero_poly(p: &[Rational]) -> bool {
    p.iter().all(|c| *c == 0)
}

fn poly_gcd_degree(a: &[Rational], b: &[Rational]) -> usize {
    let (mut x, mut y) = (a.to_vec(), b.to_vec());
    trim(&mut x);
    trim(&mut y);
    while !is_zero_poly(&y) {
        let r = poly_rem(&x, &y);
        x = y;
        y = r;
    }
    x.len() - 1
}

fn sturm_chain(p: &[Rational]) -> Vec<Vec<Rational>> {
    let mut chain = vec![p.to_vec(), derivative(p)];
    loop {
        let n = chain.len();
        let r = poly_rem(&chain[n - 2], &chain[n - 1]);
        if is_zero_poly(&r) {
            break;
        }
        chain.push(r.into_iter().map(|c| -c).collect());
    }
    chain
}

fn eval(p: &[Rational], x: &Rational) -> Rational {
    let mut acc = Rational::new();
    for c in p.iter().rev() {
        acc *= x;
        acc += c;
    }
    acc
}

fn sign_changes(chain: &[Vec<Rational>], x: &Rational) -> usize {
    let signs: Vec<Ordering> = chain
        .iter()
        .map(|p| eval(p, x).cmp0())
        .filter(|o| *o != Ordering::Equal)
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Real roots of a squarefree polynomial with all roots real, ascending,
/// to `prec` bits.
fn real_roots(p: &[Rational], prec: u32) -> Vec<Float> {
    let chain = sturm_chain(p);
    let lead = p.last().unwrap();
    let bound = p
        .iter()
        .map(|c| Rational::from(c / lead).abs())
        .max()
        .unwrap()
        + 1u32;
    let mut stack = vec![(Rational::from(-&bound), bound)];
    let mut isolated = Vec::new();
    while let Some((a, b)) = stack.pop() {
        let count = sign_changes(&chain, &a) - sign_changes(&chain, &b);
        match count {
            0 => {}
            1 => isolated.push((a, b)),
            _ => {
                let mid = Rational::from(&a + &b) / 2u32;
                stack.push((a, mid.clone()));
                stack.push((mid, b));
            }
        }
    }
    isolated.sort_by(|x, y| x.0.cmp(&y.0));
    let wp = prec + 32;
    isolated
        .into_iter()
        .map(|(a, b)| {
            let (mut lo, mut hi) = (Float::with_val(wp, &a), Float::with_val(wp, &b));
            let f_lo = eval_float(p, &lo).cmp0();
            for _ in 0..wp + 64 {
                let mid = Float::with_val(wp, &lo + &hi) / 2u32;
                if mid == lo || mid == hi {
                    break;
                }
                if eval_float(p, &mid).cmp0() == f_lo {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Float::with_val(prec, &lo + &hi) / 2u32
        })
        .collect()
}

fn eval_float(p: &[Rational], x: &Float) -> Float {
    let mut acc = Float::new(x.prec());
    for c in p.iter().rev() {
        acc *= x;
        acc += c;
    }
    acc
}

fn cmp_f(a: &Float, b: &Float) -> Ordering {
    a.partial_cmp(b).unwrap_or(Ordering::Equal)
}

/// Normalised eigenforms of `S_k` to `q^trunc`.
///
/// The roots of the characteristic polynomial of `T_2` on the Miller basis
/// are isolated exactly and refined in floating point; `T_3` is used when
/// `T_2` has a repeated eigenvalue. A one-dimensional space returns its
/// exact generator. Empty spaces give empty data.
pub fn eigenforms(k: u32, trunc: u64, prec: u32) -> Result<EigenData> {
    let dim = dim_cusp(k);
    if dim == 0 {
        super::check_weight(k)?;
        return Ok(EigenData { k, eigs: Vec::new() });
    }
    let trunc_b = trunc.max(3 * dim as u64).max(3);
    let basis = miller_basis(k, SpaceKind::Cuspidal, trunc_b)?;
    if dim == 1 {
        let f = basis.basis[0].truncate(trunc.max(3));
        let lambda2 = Float::with_val(prec, &f.coeff(2)?);
        let lambda3 = Float::with_val(prec, &f.coeff(3)?);
        return Ok(EigenData {
            k,
            eigs: vec![Eigenform {
                series: FloatQSeries::from_exact(&f, prec),
                exact: Some(f),
                lambda2,
                lambda3,
                norm: None,
            }],
        });
    }

    let mut chosen = None;
    for m in [2u64, 3] {
        let mat = hecke_matrix(&basis, m)?;
        let p = charpoly(&mat);
        if poly_gcd_degree(&p, &derivative(&p)) == 0 {
            chosen = Some((mat, p));
            break;
        }
    }
    let Some((mat, p)) = chosen else {
        return Err(Error::Degenerate {
            weight: k,
            detail: "T2 and T3 both have repeated eigenvalues".into(),
        });
    };

    let wp = prec + 64;
    let roots = real_roots(&p, wp);
    if roots.len() != dim {
        return Err(Error::Degenerate {
            weight: k,
            detail: format!("found {} real eigenvalues for dimension {dim}", roots.len()),
        });
    }
    let gap = roots
        .windows(2)
        .map(|w| Float::with_val(wp, &w[1] - &w[0]).to_f64())
        .fold(f64::INFINITY, f64::min);
    let norm_m = mat
        .iter()
        .flatten()
        .map(|c| c.to_f64().abs())
        .fold(0.0, f64::max)
        * dim as f64;

    let fbasis: Vec<FloatQSeries> = basis
        .basis
        .iter()
        .map(|b| FloatQSeries::from_exact(&b.truncate(trunc.max(3)), wp))
        .collect();
    let mut eigs = Vec::with_capacity(dim);
    for lam in &roots {
        let shifted: Vec<Vec<Float>> = mat
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, c)| {
                        let x = Float::with_val(wp, c);
                        if i == j {
                            x - lam
                        } else {
                            x
                        }
                    })
                    .collect()
            })
            .collect();
        let mut v = null_vector(&shifted, wp);
        let v0 = v[0].clone();
        if v0.is_zero() {
            return Err(Error::Degenerate {
                weight: k,
                detail: "eigenvector with vanishing first coefficient".into(),
            });
        }
        for x in v.iter_mut() {
            *x /= &v0;
        }
        // Eigenvector sensitivity ~ (|M| / gap) relative to the working unit.
        let vmax = v.iter().map(|x| x.to_f64().abs()).fold(0.0, f64::max);
        let v_err = vmax * (dim * dim) as f64 * 64.0 * (1.0 + norm_m / gap) * 2f64.powi(-(wp as i32) + 8);
        let items: Vec<(BigComplex, f64, &FloatQSeries)> = v
            .iter()
            .zip(&fbasis)
            .map(|(x, b)| (BigComplex::from_real(x.clone()), v_err, b))
            .collect();
        let series = FloatQSeries::linear_combination(&items)?;
        let series = series.round_to(prec);
        let lambda2 = Float::with_val(prec, &series.coeff(2)?.re);
        let lambda3 = Float::with_val(prec, &series.coeff(3)?.re);
        eigs.push(Eigenform {
            series,
            exact: None,
            lambda2,
            lambda3,
            norm: None,
        });
    }
    eigs.sort_by(|a, b| cmp_f(&a.lambda2, &b.lambda2).then(cmp_f(&a.lambda3, &b.lambda3)));
    Ok(EigenData { k, eigs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::level1::{delta, hecke};

    #[test]
    fn dim_one_spaces_are_exact() {
        let e = eigenforms(12, 20, 128).unwrap();
        assert_eq!(e.dim(), 1);
        assert_eq!(e.eigs[0].exact.as_ref().unwrap(), &delta(20));
        assert_eq!(e.eigs[0].lambda2, -24);
        let e16 = eigenforms(16, 10, 128).unwrap();
        let f = e16.eigs[0].exact.as_ref().unwrap();
        let basis = miller_basis(16, SpaceKind::Cuspidal, 10).unwrap();
        let m = hecke_matrix(&basis, 2).unwrap();
        assert_eq!(f.coeff(2).unwrap(), m[0][0]);
        assert!(eigenforms(10, 10, 128).unwrap().eigs.is_empty());
    }

    #[test]
    fn weight_24_roots_of_exact_charpoly() {
        let basis = miller_basis(24, SpaceKind::Cuspidal, 10).unwrap();
        let p = charpoly(&hecke_matrix(&basis, 2).unwrap());
        let e = eigenforms(24, 12, 256).unwrap();
        assert_eq!(e.dim(), 2);
        for f in &e.eigs {
            let v = eval_float(&p, &f.lambda2);
            assert!(v.to_f64().abs() < 1e-40, "{v}");
            // a(2)^2 = a(4) + 2^23
            let a2 = f.series.coeff(2).unwrap().re;
            let a4 = f.series.coeff(4).unwrap().re;
            let lhs = Float::with_val(256, a2.square_ref()) - a4 - Float::with_val(256, 1u64 << 23);
            assert!(lhs.to_f64().abs() < 1e-20 * (1u64 << 23) as f64);
        }
        assert!(e.eigs[0].lambda2 < e.eigs[1].lambda2);
    }

    #[test]
    fn hecke_matrices_commute() {
        let basis = miller_basis(36, SpaceKind::Cuspidal, 40).unwrap();
        let m2 = hecke_matrix(&basis, 2).unwrap();
        let m3 = hecke_matrix(&basis, 3).unwrap();
        use crate::linalg::mat_mul;
        assert_eq!(mat_mul(&m2, &m3), mat_mul(&m3, &m2));
    }

    #[test]
    fn eigenforms_are_t2_eigenvectors() {
        let e = eigenforms(28, 30, 256).unwrap();
        for f in &e.eigs {
            let t = hecke(28, 2, f.series.series()).unwrap();
            for n in 1..=15u64 {
                let lhs = t.get(n).unwrap().cloned().unwrap();
                let rhs = f.series.coeff(n).unwrap().mul_float(&f.lambda2);
                let d = lhs.sub_ref(&rhs).abs_f64();
                assert!(d <= 1e-20 * (1.0 + rhs.abs_f64()), "n = {n}: {d}");
            }
        }
    }
}
