//! Numerical verification of the bracket identities, with JSON reports
//! and an on-disk cache of eigenforms, plus-space bases and Poincare series.

mod cache;
mod config;
mod context;
mod ell;
mod identities;
mod report;

pub use cache::{BallRecord, Cache};
pub use config::{run, Config, Identity};
pub use context::{Context, PlusBasis};
pub use ell::{ell_nu, prop23_rhs, theta_pairing_sum, Approx};
pub use identities::{
    prop22_inner_rhs, verify_cor25, verify_prop21, verify_prop22_combination, verify_prop22_inner, verify_prop23,
    verify_thm24,
};
pub use report::{verdict, Diagnostic, IdentityReport, Params, Verdict};

/// Working precision of the verifiers unless configured otherwise.
pub const HARNESS_PREC: u32 = 128;
