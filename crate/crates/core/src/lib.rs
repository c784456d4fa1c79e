//! Rankin-Cohen brackets of Hecke eigenforms and the first Shimura lift,
//! computed on truncated q-expansions.
//!
//! The crate is organised bottom-up:
//!
//! * [`qseries`]: exact and arbitrary-precision truncated q-expansions;
//! * [`numerics`]: Bernoulli numbers, exact half-integral Gamma values,
//!   certified Bessel `J`, Kloosterman sums;
//! * [`level1`]: Eisenstein series, `Delta`, Miller bases, Hecke operators
//!   and numerically extracted eigenforms on `SL2(Z)`;
//! * [`halfint`]: theta, `U4`, the Kohnen plus space and its cusp expansions;
//! * [`brackets`], [`shimura`], [`poincare`], [`petersson`];
//! * [`harness`]: identity verifiers, reports and the expansion cache.
//!
//! The `book/` directory next to the workspace holds a longer guide; its
//! code listings are compiled as doctests of this crate.

pub mod brackets;
pub mod complex;
pub mod error;
pub mod halfint;
pub mod harness;
pub mod level1;
pub mod linalg;
pub mod numerics;
pub mod petersson;
pub mod poincare;
pub mod qseries;
pub mod shimura;
pub mod weight;

pub use complex::BigComplex;
pub use error::{Error, Result};
pub use qseries::{ExactQSeries, FloatQSeries, QSeries};
pub use weight::{FormDescriptor, HalfInt};

/// Default working precision in bits.
pub const DEFAULT_PREC: u32 = 256;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/qseries.md")]
    mod qseries {}
    #[doc = include_str!("../../../book/src/brackets.md")]
    mod brackets {}
    #[doc = include_str!("../../../book/src/shimura.md")]
    mod shimura {}
    #[doc = include_str!("../../../book/src/poincare.md")]
    mod poincare {}
    #[doc = include_str!("../../../book/src/petersson.md")]
    mod petersson {}
    #[doc = include_str!("../../../book/src/identities.md")]
    mod identities {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
mod readme {}
