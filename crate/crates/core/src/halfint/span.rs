use rug::{Float, Rational};

use super::PlusForm;
use crate::brackets::bracket_theta_dilated;
use crate::complex::BigComplex;
use crate::error::{Error, Result};
use crate::level1::{dim_cusp, echelon, eigenforms, miller_basis, SpaceKind};
use crate::linalg::inverse;
use crate::qseries::{Expansion, FloatQSeries};
use crate::shimura::{shimura1, shimura1_float};

/// Echelonised brackets `[theta, h(4 tau)]_nu'` spanning the plus space.
#[derive(Clone, Debug)]
pub struct PlusSpan {
    pub lam: u32,
    pub forms: Vec<PlusForm>,
    pub pivots: Vec<u64>,
    /// `dim S_{2 lam}`.
    pub expected: usize,
}

impl PlusSpan {
    pub fn rank(&self) -> usize {
        self.forms.len()
    }
}

fn check_lam(lam: u32) -> Result<()> {
    if lam % 2 == 1 {
        return Err(Error::InvalidWeight(format!("odd lam = {lam} is not supported")));
    }
    if lam < 12 {
        return Err(Error::InvalidWeight(format!("plus space of weight {lam}+1/2 is zero")));
    }
    Ok(())
}

/// Brackets `[theta, h(4 tau)]_nu'` with `k' + 2 nu' = lam`, `h` running
/// over the Miller basis of `S_k'` for `nu' = 0` and of `M_k'` otherwise,
/// echelonised to `q^trunc`.
pub fn plus_span(lam: u32, trunc: u64) -> Result<PlusSpan> {
    check_lam(lam)?;
    let h_trunc = trunc / 4;
    let mut candidates = Vec::new();
    for nu in 0..=(lam - 4) / 2 {
        let k = lam - 2 * nu;
        let kind = if nu == 0 { SpaceKind::Cuspidal } else { SpaceKind::Full };
        let basis = miller_basis(k, kind, h_trunc.max(crate::level1::dim_modular(k) as u64))?;
        for h in &basis.basis {
            let g = bracket_theta_dilated(&h.truncate(h_trunc), k, nu)?;
            let s = g.series.as_exact().expect("exact bracket").clone();
            // Cusp forms: the constant terms of all three expansions are c(0).
            if s.coeff(0)? != 0 {
                return Err(Error::InvalidArgument(format!(
                    "bracket of weight {k}, nu = {nu} is not cuspidal"
                )));
            }
            candidates.push(s);
        }
    }
    let (rows, pivots) = echelon(&candidates, trunc)?;
    let expected = dim_cusp(2 * lam);
    if rows.len() < expected {
        return Err(Error::RankDeficient {
            rank: rows.len(),
            expected,
        });
    }
    if rows.len() > expected {
        return Err(Error::InvalidArgument(format!(
            "plus span has rank {} above dim S_{} = {expected}",
            rows.len(),
            2 * lam
        )));
    }
    let forms = rows
        .into_iter()
        .enumerate()
        .map(|(i, s)| PlusForm::new(lam, Expansion::Exact(s), format!("plus span element {i}")))
        .collect::<Result<Vec<_>>>()?;
    Ok(PlusSpan {
        lam,
        forms,
        pivots,
        expected,
    })
}

/// `g_mu` with `S_1(g_mu) = c_mu(1) F_mu`, scaled so that its first
/// nonvanishing coefficient is 1.
#[derive(Clone, Debug)]
pub struct PlusEigenform {
    pub g: PlusForm,
    pub c1: BigComplex,
    /// `max |S_1(g) - c(1) F| / max |c(1) F|` over the checked range.
    pub lift_residual: f64,
    pub lambda2: Float,
}

/// Eigenbasis of the plus space of weight `lam + 1/2` matched to the
/// eigenforms of `S_{2 lam}` in their order.
pub fn plus_eigenbasis(lam: u32, trunc: u64, prec: u32) -> Result<Vec<PlusEigenform>> {
    check_lam(lam)?;
    // Long expansions of the span have large coefficients, so the uniform
    // error of the combination is kept small with guard bits.
    let (out_prec, prec) = (prec, prec + 256);
    let d = dim_cusp(2 * lam);
    let m_check = (d as u64 + 2).max(6);
    let span = plus_span(lam, trunc.max(m_check * m_check))?;
    let target = miller_basis(2 * lam, SpaceKind::Cuspidal, m_check)?;

    // Columns: Miller coordinates of S_1(span_i); the lift must land in S_{2 lam}.
    let mut a = vec![vec![Rational::new(); d]; d];
    for (i, g) in span.forms.iter().enumerate() {
        let lift = shimura1(g, m_check)?;
        let lift = lift.as_exact().expect("exact span");
        let (coords, residual) = target.coordinates(lift)?;
        if residual != 0 {
            return Err(Error::InvalidArgument(format!(
                "lift of plus span element {i} is not in S_{}",
                2 * lam
            )));
        }
        for (j, c) in coords.into_iter().enumerate() {
            a[j][i] = c;
        }
    }
    let a_inv = inverse(&a)?;
    let inv_norm = a_inv
        .iter()
        .map(|row| row.iter().map(|c| c.to_f64().abs()).sum::<f64>())
        .fold(0.0, f64::max);

    let eig = eigenforms(2 * lam, m_check, prec)?;
    let spans_f: Vec<FloatQSeries> = span.forms.iter().map(|g| g.to_float(prec)).collect();
    let mut out = Vec::with_capacity(d);
    for (mu, f) in eig.eigs.iter().enumerate() {
        let v: Vec<BigComplex> = (1..=d as u64).map(|n| f.series.coeff(n)).collect::<Result<_>>()?;
        let x_err = inv_norm * f.series.err();
        let xs: Vec<BigComplex> = a_inv
            .iter()
            .map(|row| {
                let mut acc = BigComplex::zero(prec);
                for (c, vj) in row.iter().zip(&v) {
                    acc.add_assign_ref(&vj.mul_rational(c));
                }
                acc
            })
            .collect();
        let items: Vec<(BigComplex, f64, &FloatQSeries)> = xs.iter().map(|x| (x.clone(), x_err, &spans_f[0])).collect();
        let items: Vec<(BigComplex, f64, &FloatQSeries)> = items
            .into_iter()
            .zip(&spans_f)
            .map(|((x, e, _), s)| (x, e, s))
            .collect();
        let g = FloatQSeries::linear_combination(&items)?;

        let tol = 1e6 * g.err() + 2f64.powi(-(prec as i32) / 2);
        let (n0, lead) = g
            .terms()
            .find(|(_, c)| c.abs_f64() > tol)
            .map(|(n, c)| (n, c.clone()))
            .ok_or(Error::VanishingLift { index: mu })?;
        let inv = BigComplex::one(prec).div_ref(&lead);
        let inv_err = g.err() / (lead.abs_f64() - g.err()).powi(2);
        let g = g.scale(&inv, inv_err);
        let c1 = g.coeff(1)?;
        if c1.abs_f64() <= 4.0 * g.err() {
            return Err(Error::VanishingLift { index: mu });
        }
        let lift = shimura1_float(&g, lam, m_check)?;
        let expect = f.series.truncate(m_check).scale(&c1, g.err());
        let mut worst: f64 = 0.0;
        for n in 1..=m_check {
            worst = worst.max(lift.coeff(n)?.sub_ref(&expect.coeff(n)?).abs_f64());
        }
        let lift_residual = worst / expect.max_abs();
        let form = PlusForm::new(
            lam,
            Expansion::Float(g.round_to(out_prec)),
            format!("plus eigenform {mu} (first nonzero coefficient at q^{n0} set to 1)"),
        )?;
        out.push(PlusEigenform {
            g: form,
            c1: c1.with_prec(out_prec),
            lift_residual,
            lambda2: Float::with_val(out_prec, &f.lambda2),
        });
    }
    Ok(out)
}
