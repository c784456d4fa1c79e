//! Text form of series: rationals as `"p/q"`, floats as decimal strings
//! carrying enough digits to round-trip at the recorded precision.

use rug::{Float, Rational};
use serde::{Deserialize, Serialize};

use super::{ExactQSeries, FloatQSeries, QSeries};
use crate::complex::BigComplex;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SeriesRecord {
    Exact {
        width: u32,
        trunc: u64,
        coeffs: Vec<(u64, String)>,
    },
    Float {
        width: u32,
        trunc: u64,
        prec: u32,
        err: f64,
        coeffs: Vec<(u64, String, String)>,
    },
}

/// Decimal digits that make a `prec`-bit float round-trip.
fn digits_for(prec: u32) -> usize {
    (prec as f64 * std::f64::consts::LOG10_2).ceil() as usize + 2
}

pub(crate) fn float_to_string(x: &Float) -> String {
    x.to_string_radix(10, Some(digits_for(x.prec())))
}

pub(crate) fn float_from_str(prec: u32, s: &str) -> Result<Float> {
    let parsed = Float::parse(s).map_err(|e| Error::Parse(format!("{s}: {e}")))?;
    Ok(Float::with_val(prec, parsed))
}

pub(crate) fn rational_from_str(s: &str) -> Result<Rational> {
    s.parse::<Rational>()
        .map_err(|e| Error::Parse(format!("{s}: {e}")))
}

impl From<&ExactQSeries> for SeriesRecord {
    fn from(s: &ExactQSeries) -> Self {
        SeriesRecord::Exact {
            width: s.width(),
            trunc: s.trunc(),
            coeffs: s.terms().map(|(n, c)| (n, c.to_string())).collect(),
        }
    }
}

impl From<&FloatQSeries> for SeriesRecord {
    fn from(s: &FloatQSeries) -> Self {
        SeriesRecord::Float {
            width: s.width(),
            trunc: s.trunc(),
            prec: s.prec(),
            err: s.err(),
            coeffs: s
                .terms()
                .map(|(n, c)| (n, float_to_string(&c.re), float_to_string(&c.im)))
                .collect(),
        }
    }
}

impl SeriesRecord {
    pub fn to_exact(&self) -> Result<ExactQSeries> {
        match self {
            SeriesRecord::Exact { width, trunc, coeffs } => {
                let mut terms = Vec::with_capacity(coeffs.len());
                for (n, c) in coeffs {
                    terms.push((*n, rational_from_str(c)?));
                }
                Ok(QSeries::from_terms(*width, *trunc, terms))
            }
            SeriesRecord::Float { .. } => Err(Error::Parse("expected an exact series record".into())),
        }
    }

    pub fn to_float(&self) -> Result<FloatQSeries> {
        match self {
            SeriesRecord::Float {
                width,
                trunc,
                prec,
                err,
                coeffs,
            } => {
                let mut terms = Vec::with_capacity(coeffs.len());
                for (n, re, im) in coeffs {
                    let c = BigComplex::from_parts(float_from_str(*prec, re)?, float_from_str(*prec, im)?);
                    terms.push((*n, c));
                }
                Ok(FloatQSeries::from_terms(*width, *trunc, *prec, *err, terms))
            }
            SeriesRecord::Exact { .. } => Err(Error::Parse("expected a float series record".into())),
        }
    }
}
