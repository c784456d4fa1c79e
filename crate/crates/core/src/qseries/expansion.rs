use super::{ExactQSeries, FloatQSeries};
use crate::complex::BigComplex;
use crate::error::Result;

/// Either kind of series, for values that are exact on some code paths only.
#[derive(Clone, Debug, PartialEq)]
pub enum Expansion {
    Exact(ExactQSeries),
    Float(FloatQSeries),
}

impl Expansion {
    pub fn width(&self) -> u32 {
        match self {
            Expansion::Exact(s) => s.width(),
            Expansion::Float(s) => s.width(),
        }
    }

    pub fn trunc(&self) -> u64 {
        match self {
            Expansion::Exact(s) => s.trunc(),
            Expansion::Float(s) => s.trunc(),
        }
    }

    pub fn as_exact(&self) -> Option<&ExactQSeries> {
        match self {
            Expansion::Exact(s) => Some(s),
            Expansion::Float(_) => None,
        }
    }

    /// Float view at `prec` bits; float inputs keep their own precision.
    pub fn to_float(&self, prec: u32) -> FloatQSeries {
        match self {
            Expansion::Exact(s) => FloatQSeries::from_exact(s, prec),
            Expansion::Float(s) => s.clone(),
        }
    }

    pub fn coeff(&self, n: u64, prec: u32) -> Result<BigComplex> {
        match self {
            Expansion::Exact(s) => Ok(BigComplex::from_rational(prec, &s.coeff(n)?)),
            Expansion::Float(s) => s.coeff(n),
        }
    }

    /// Coefficient error bound (zero for exact series).
    pub fn err(&self) -> f64 {
        match self {
            Expansion::Exact(_) => 0.0,
            Expansion::Float(s) => s.err(),
        }
    }

    pub fn truncate(&self, trunc: u64) -> Self {
        match self {
            Expansion::Exact(s) => Expansion::Exact(s.truncate(trunc)),
            Expansion::Float(s) => Expansion::Float(s.truncate(trunc)),
        }
    }
}
