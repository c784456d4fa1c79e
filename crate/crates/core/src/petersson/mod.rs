//! Petersson inner products `<f, g> = [Gamma(1) : Gamma]^-1 int f conj(g) y^k dmu`.
//!
//! Level 1 is integrated over the standard fundamental domain directly. For
//! the plus space, `<g, h> = 2^(-2 lam) <g|U4, h|U4>` on `Gamma0(4)`, which is
//! split over six right cosets of `Gamma0(4)` in `SL2(Z)`:
//! `I`, `(1 0; -2 1)` and `(1 0; -1 1) T^j` for `j = 0..3`.

mod quadrature;

use rug::Float;
use serde::{Deserialize, Serialize};

pub use quadrature::{gauss_legendre, QuadOptions};

use crate::complex::BigComplex;
use crate::error::{Error, Result};
use crate::halfint::{cusp_expansions, PlusForm};
use crate::level1::EigenData;
use crate::numerics::Ball;
use crate::qseries::{up, FloatQSeries};
pub(crate) use quadrature::useful_terms;
use quadrature::integrate_fd;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InnerMethod {
    Quadrature,
    Unfolding,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InnerProductResult {
    pub value: BigComplex,
    pub quad_err: f64,
    pub trunc_err: f64,
    pub method: InnerMethod,
}

impl InnerProductResult {
    pub fn total_err(&self) -> f64 {
        up(self.quad_err + self.trunc_err)
    }

    /// A norm as a real ball, rejecting a visible imaginary part.
    pub fn as_norm(&self) -> Result<Ball> {
        let err = self.total_err();
        let imag = self.value.im.to_f64().abs();
        if imag > err.max(self.value.abs_f64() * 1e-25) {
            return Err(Error::ComplexNorm { imag, err });
        }
        Ok(Ball {
            mid: self.value.re.clone(),
            rad: up(err + imag),
        })
    }
}

/// `<f, g>` for cusp forms of weight `k` on `SL2(Z)`.
pub fn inner_level1(f: &FloatQSeries, g: &FloatQSeries, k: u32, prec: u32) -> Result<InnerProductResult> {
    inner_level1_with(f, g, k, prec, &QuadOptions::default())
}

pub fn inner_level1_with(
    f: &FloatQSeries,
    g: &FloatQSeries,
    k: u32,
    prec: u32,
    opts: &QuadOptions,
) -> Result<InnerProductResult> {
    if f.width() != 1 || g.width() != 1 {
        return Err(Error::WidthMismatch {
            left: f.width().max(g.width()),
            right: 1,
        });
    }
    let p = integrate_fd(f, g, 2 * k, 0, opts, prec)?;
    Ok(InnerProductResult {
        value: p.value,
        quad_err: p.quad_err,
        trunc_err: p.trunc_err,
        method: InnerMethod::Quadrature,
    })
}

/// Attaches `<f_j, f_j>` to every eigenform.
pub fn attach_norms(eig: &mut EigenData, prec: u32) -> Result<()> {
    let norms = eig
        .eigs
        .iter()
        .map(|e| inner_level1(&e.series, &e.series, eig.k, prec)?.as_norm())
        .collect::<Result<Vec<_>>>()?;
    eig.set_norms(norms)
}

/// Which right-coset representatives of `Gamma0(4)` in `SL2(Z)` are used.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum RepSet {
    #[default]
    Standard,
    /// Every representative `rho` replaced by `rho T`.
    Shifted,
}

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct PlusOptions {
    pub quad: QuadOptions,
    pub reps: RepSet,
    /// Counts only `(1 0; -1 1)` of the four cosets of the cusp `0`.
    /// A deliberately wrong assembly, kept for negative controls.
    pub drop_case3_multiplicity: bool,
}

/// `<g, h>` on the plus space of weight `lam + 1/2`.
pub fn inner_plus(g: &PlusForm, h: &PlusForm, prec: u32) -> Result<InnerProductResult> {
    inner_plus_with(g, h, prec, &PlusOptions::default())
}

pub fn inner_plus_with(g: &PlusForm, h: &PlusForm, prec: u32, opts: &PlusOptions) -> Result<InnerProductResult> {
    if g.lam != h.lam {
        return Err(Error::InvalidWeight(format!(
            "weights {}+1/2 and {}+1/2 differ",
            g.lam, h.lam
        )));
    }
    let lam = g.lam;
    let eg = cusp_expansions(g, prec)?;
    let eh = cusp_expansions(h, prec)?;
    let s = match opts.reps {
        RepSet::Standard => 0,
        RepSet::Shifted => 1,
    };
    let twice_kappa = 2 * lam + 1;

    let mut value = BigComplex::zero(prec);
    let (mut quad_err, mut trunc_err) = (0.0, 0.0);
    for (a, b) in eg.iter().zip(&eh) {
        let shifts: Vec<i64> = match a.case {
            crate::halfint::CuspCase::Case3 if !opts.drop_case3_multiplicity => (0..4).map(|j| j + s).collect(),
            _ => vec![s],
        };
        // Same weight and multiplier: the phases of the prefactors cancel.
        let scale = a.prefactor.modulus_sqr();
        let scale_f = scale.to_f64();
        for shift in shifts {
            let p = integrate_fd(&a.series, &b.series, twice_kappa, shift, &opts.quad, prec)?;
            value.add_assign_ref(&p.value.mul_rational(&scale));
            quad_err += p.quad_err * scale_f;
            trunc_err += p.trunc_err * scale_f;
        }
    }
    // 2^(-2 lam) from U4 = (+-2^lam) W4, 1/6 from the index.
    let denom = Float::with_val(prec, Float::i_exp(6, 2 * lam as i32));
    let value = BigComplex::from_parts(
        Float::with_val(prec, &value.re / &denom),
        Float::with_val(prec, &value.im / &denom),
    );
    let d = denom.to_f64();
    Ok(InnerProductResult {
        value,
        quad_err: up(quad_err / d),
        trunc_err: up(trunc_err / d),
        method: InnerMethod::Quadrature,
    })
}
