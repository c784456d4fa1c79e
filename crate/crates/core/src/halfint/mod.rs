//! Half-integral weight on `Gamma0(4)`: theta, `U4`, the Kohnen plus space
//! and the expansions of `g|U4` at the six cosets of `Gamma0(4)` in `SL2(Z)`.

mod span;

use rug::{Float, Rational};

use crate::complex::{sqrt2_pow, BigComplex};
use crate::error::{Error, Result};
use crate::qseries::{ExactQSeries, Expansion, FloatQSeries, QSeries};

pub use span::{plus_eigenbasis, plus_span, PlusEigenform, PlusSpan};

/// `sum_{n in Z} q^(n^2)` to `q^trunc`.
pub fn theta(trunc: u64) -> ExactQSeries {
    let mut terms = vec![(0u64, Rational::from(1))];
    let mut r = 1u64;
    while r * r <= trunc {
        terms.push((r * r, Rational::from(2)));
        r += 1;
    }
    ExactQSeries::from_terms(1, trunc, terms)
}

/// `f|U4 = sum c(4n) q^n`.
pub fn u4(f: &ExactQSeries) -> ExactQSeries {
    f.u4()
}

/// A form of weight `lam + 1/2` in the plus space, by its expansion at
/// infinity.
#[derive(Clone, Debug, PartialEq)]
pub struct PlusForm {
    pub lam: u32,
    pub series: Expansion,
    pub provenance: String,
}

/// Residues of `n` mod 4 where plus-space coefficients vanish.
fn forbidden(lam: u32, n: u64) -> bool {
    let r = n % 4;
    if lam % 2 == 0 {
        r == 2 || r == 3
    } else {
        r == 1 || r == 2
    }
}

/// First index violating the plus condition, if any. Float coefficients
/// count as zero when they are within the error bound.
pub fn plus_violation(lam: u32, series: &Expansion) -> Option<u64> {
    match series {
        Expansion::Exact(s) => s.terms().map(|(n, _)| n).find(|&n| forbidden(lam, n)),
        Expansion::Float(s) => {
            let tol = 4.0 * s.err();
            s.terms()
                .find(|(n, c)| forbidden(lam, *n) && c.abs_f64() > tol)
                .map(|(n, _)| n)
        }
    }
}

impl PlusForm {
    pub fn new(lam: u32, series: Expansion, provenance: impl Into<String>) -> Result<Self> {
        if series.width() != 1 {
            return Err(Error::WidthMismatch { left: series.width(), right: 1 });
        }
        if let Some(index) = plus_violation(lam, &series) {
            return Err(Error::PlusConditionViolated { index });
        }
        Ok(Self {
            lam,
            series,
            provenance: provenance.into(),
        })
    }

    pub fn trunc(&self) -> u64 {
        self.series.trunc()
    }

    pub fn to_float(&self, prec: u32) -> FloatQSeries {
        self.series.to_float(prec)
    }

    /// `s * self`, kept exact for rational `s` on exact series.
    pub fn scaled(&self, s: &BigComplex, s_err: f64, prec: u32) -> Self {
        let series = match &self.series {
            Expansion::Exact(e) if s.im.is_zero() && s.re.is_finite() => {
                let r = s.re.to_rational().expect("finite");
                if s_err == 0.0 {
                    Expansion::Exact(e.scale_rational(&r))
                } else {
                    Expansion::Float(FloatQSeries::from_exact(e, prec).scale(s, s_err))
                }
            }
            other => Expansion::Float(other.to_float(prec).scale(s, s_err)),
        };
        Self {
            lam: self.lam,
            series,
            provenance: format!("scaled {}", self.provenance),
        }
    }
}

pub fn plus_check(f: &PlusForm) -> bool {
    plus_violation(f.lam, &f.series).is_none()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CuspCase {
    /// The identity coset: `sum c(4n) q^n`.
    Case1,
    /// The cusp `1/2`: `sum_{n odd} c(n) q^(n/4)`.
    Case2,
    /// The cusp `0` and its translates: `sum c(n) (-i)^n q^(n/4)`.
    Case3,
}

/// `2^(sqrt2_exp / 2) * e^(2 pi i zeta8_exp / 8)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Prefactor {
    pub sqrt2_exp: i32,
    pub zeta8_exp: u32,
}

impl Prefactor {
    pub const ONE: Prefactor = Prefactor {
        sqrt2_exp: 0,
        zeta8_exp: 0,
    };

    pub fn modulus_sqr(&self) -> Rational {
        if self.sqrt2_exp >= 0 {
            Rational::from(1u64 << self.sqrt2_exp)
        } else {
            Rational::from((1, 1u64 << -self.sqrt2_exp))
        }
    }

    pub fn to_complex(&self, prec: u32) -> BigComplex {
        let t = Float::with_val(prec, self.zeta8_exp) / 8u32;
        BigComplex::expi_turns(&t).mul_float(&sqrt2_pow(prec, self.sqrt2_exp))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CuspExpansion {
    pub case: CuspCase,
    /// Width 1 for case 1 and width 4 otherwise.
    pub series: FloatQSeries,
    pub prefactor: Prefactor,
}

impl CuspExpansion {
    /// The slashed form `prefactor * series` at `tau = x + i y`.
    pub fn eval(&self, x: &Float, y: &Float) -> BigComplex {
        let prec = self.series.prec();
        self.series.eval(x, y).mul_ref(&self.prefactor.to_complex(prec))
    }
}

/// Expansions of `g|U4` slashed by the coset representatives `I`,
/// `(1 0; -2 1)` and `(1 0; -1 1)`; the last one is to be translated by
/// `j = 0..3` to cover its four cosets.
pub fn cusp_expansions(g: &PlusForm, prec: u32) -> Result<[CuspExpansion; 3]> {
    if let Some(index) = plus_violation(g.lam, &g.series) {
        return Err(Error::PlusConditionViolated { index });
    }
    let f = g.to_float(prec);
    let trunc = f.trunc();
    let err = f.err();

    let case1 = f.u4();
    let case2 = QSeries::from_terms(
        4,
        trunc,
        f.terms().filter(|(n, _)| n % 2 == 1).map(|(n, c)| (n, c.clone())),
    );
    let case3 = QSeries::from_terms(4, trunc, f.terms().map(|(n, c)| (n, c.mul_i_pow(-(n as i64)))));
    // i^(lam + 1/2) = zeta8^(2 lam + 1)
    let zeta = (2 * g.lam + 1) % 8;
    Ok([
        CuspExpansion {
            case: CuspCase::Case1,
            series: case1,
            prefactor: Prefactor::ONE,
        },
        CuspExpansion {
            case: CuspCase::Case2,
            series: FloatQSeries::from_parts(case2, prec, err),
            prefactor: Prefactor::ONE,
        },
        CuspExpansion {
            case: CuspCase::Case3,
            series: FloatQSeries::from_parts(case3, prec, err),
            prefactor: Prefactor {
                sqrt2_exp: -1,
                zeta8_exp: zeta,
            },
        },
    ])
}

/// Sign and power of two in `g|U4 = (-1)^(lam/2) 2^lam g|W4` for even `lam`.
pub fn plus_relation_constant(lam: u32) -> Rational {
    let c = Rational::from(rug::Integer::from(1) << lam);
    if (lam / 2) % 2 == 1 {
        -c
    } else {
        c
    }
}

/// `(g|W4)(tau) = (-2 i tau)^-(lam+1/2) g(-1/(4 tau))`, evaluated from the
/// expansion at infinity.
pub fn eval_w4(g: &FloatQSeries, lam: u32, x: &Float, y: &Float) -> BigComplex {
    let prec = g.prec();
    let tau = BigComplex::from_parts(x.clone(), y.clone());
    let z = BigComplex::from_parts(Float::with_val(prec, y * 2u32), Float::with_val(prec, x * -2i32));
    let kappa = Float::with_val(prec, 2 * lam + 1) / 2u32;
    let factor = z.powf(&Float::with_val(prec, -kappa));
    let four_tau = tau.mul_float(&Float::with_val(prec, 4));
    let w = BigComplex::from_real(Float::with_val(prec, -1)).div_ref(&four_tau);
    g.eval(&w.re, &w.im).mul_ref(&factor)
}

#[cfg(test)]
mod tests;
