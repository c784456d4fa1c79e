use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::complex::BigComplex;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Params {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k1: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k2: Option<u32>,
    pub nu: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trunc: Option<u64>,
    pub prec: u32,
}

impl std::fmt::Display for Params {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts = Vec::new();
        for (name, v) in [("k", self.k), ("k1", self.k1), ("k2", self.k2)] {
            if let Some(v) = v {
                parts.push(format!("{name}={v}"));
            }
        }
        parts.push(format!("nu={}", self.nu));
        if let Some(m) = self.m {
            parts.push(format!("m={m}"));
        }
        if let Some(t) = self.trunc {
            parts.push(format!("N={t}"));
        }
        parts.push(format!("prec={}", self.prec));
        f.write_str(&parts.join(" "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub name: String,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identity: String,
    pub params: Params,
    /// Max-norm of `LHS - RHS`.
    pub residual: f64,
    /// `residual` over the max-norm of the right-hand side.
    pub rel_residual: f64,
    /// Real part of the least-squares `c` in `LHS ~ c RHS`.
    pub fitted_constant: f64,
    /// `|c - 1|`.
    pub fitted_deviation: f64,
    /// Sum of upstream error bounds, relative to the same scale as `rel_residual`.
    pub error_budget: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub diagnostics: Vec<Diagnostic>,
    pub notes: Vec<String>,
    pub timings_ms: BTreeMap<String, u64>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn diagnostic(&self, name: &str) -> Option<f64> {
        self.diagnostics.iter().find(|d| d.name == name).map(|d| d.value)
    }

    /// The report without timings, for reproducibility checks.
    pub fn without_timings(&self) -> Self {
        Self {
            timings_ms: BTreeMap::new(),
            ..self.clone()
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    /// One human-readable line.
    pub fn summary(&self) -> String {
        format!(
            "{} [{}]: {} rel_residual={:.3e} budget={:.3e} tol={:.1e} fitted={:.12}",
            self.identity,
            self.params,
            match self.verdict {
                Verdict::Pass => "PASS",
                Verdict::Fail => "FAIL",
            },
            self.rel_residual,
            self.error_budget,
            self.tolerance,
            self.fitted_constant
        )
    }
}

/// `rel <= max(tol, 3 budget)`, with the budget itself no larger than `tol`
/// so that a loose error bound cannot make a large residual pass.
pub fn verdict(rel: f64, deviation: f64, budget: f64, tol: f64) -> Verdict {
    let allowed = tol.max(3.0 * budget);
    if rel <= allowed && deviation <= allowed && budget <= tol && rel.is_finite() {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

/// Residual, scale and least-squares constant of two coefficient vectors.
#[derive(Clone, Debug)]
pub(crate) struct Comparison {
    pub residual: f64,
    pub scale: f64,
    pub fitted: (f64, f64),
    /// `max |lhs - c rhs| / scale` at the fitted `c`.
    pub fit_rel: f64,
}

impl Comparison {
    pub fn new(lhs: &[BigComplex], rhs: &[BigComplex]) -> Self {
        assert_eq!(lhs.len(), rhs.len());
        let prec = lhs.first().map(|c| c.prec()).unwrap_or(64);
        let mut residual: f64 = 0.0;
        let mut scale: f64 = 0.0;
        let mut num = BigComplex::zero(prec);
        let mut den = rug::Float::new(prec);
        for (l, r) in lhs.iter().zip(rhs) {
            residual = residual.max(l.sub_ref(r).abs_f64());
            scale = scale.max(r.abs_f64());
            num.add_assign_ref(&l.mul_conj(r));
            den += r.norm_sqr();
        }
        let fitted = if den.is_zero() {
            (f64::NAN, f64::NAN)
        } else {
            (
                rug::Float::with_val(prec, &num.re / &den).to_f64(),
                rug::Float::with_val(prec, &num.im / &den).to_f64(),
            )
        };
        let fit_rel = if den.is_zero() || scale == 0.0 {
            f64::NAN
        } else {
            let c = BigComplex::from_parts(
                rug::Float::with_val(prec, &num.re / &den),
                rug::Float::with_val(prec, &num.im / &den),
            );
            lhs.iter()
                .zip(rhs)
                .map(|(l, r)| l.sub_ref(&r.mul_ref(&c)).abs_f64())
                .fold(0.0, f64::max)
                / scale
        };
        Self {
            residual,
            scale,
            fitted,
            fit_rel,
        }
    }

    pub fn rel(&self) -> f64 {
        if self.scale == 0.0 {
            if self.residual == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.residual / self.scale
        }
    }

    pub fn deviation(&self) -> f64 {
        if self.fitted.0.is_nan() {
            // Both sides vanish identically.
            if self.residual == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            ((self.fitted.0 - 1.0).powi(2) + self.fitted.1.powi(2)).sqrt()
        }
    }
}

#[derive(Default)]
pub(crate) struct Timer {
    pub map: BTreeMap<String, u64>,
}

impl Timer {
    pub fn time<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        *self.map.entry(name.to_string()).or_default() += start.elapsed().as_millis() as u64;
        out
    }
}

pub(crate) fn diag(name: &str, value: f64) -> Diagnostic {
    Diagnostic {
        name: name.to_string(),
        value,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_rule() {
        assert_eq!(verdict(1e-7, 1e-7, 1e-9, 1e-6), Verdict::Pass);
        assert_eq!(verdict(2e-6, 1e-7, 1e-9, 1e-6), Verdict::Fail);
        // Within three error budgets of a tighter tolerance.
        assert_eq!(verdict(2e-9, 1e-9, 1e-9, 1e-9), Verdict::Pass);
        // A loose budget does not rescue a large residual.
        assert_eq!(verdict(1e-3, 1e-3, 1e-3, 1e-6), Verdict::Fail);
        assert_eq!(verdict(f64::NAN, 0.0, 0.0, 1.0), Verdict::Fail);
    }

    #[test]
    fn fitted_constant_of_a_multiple() {
        let r: Vec<BigComplex> = (1..5).map(|n| BigComplex::from_f64(64, n as f64, 0.5)).collect();
        let l: Vec<BigComplex> = r.iter().map(|c| c.mul_float(&rug::Float::with_val(64, 2))).collect();
        let c = Comparison::new(&l, &r);
        assert!((c.fitted.0 - 2.0).abs() < 1e-15 && c.fitted.1.abs() < 1e-15);
        assert!((c.rel() - 1.0).abs() < 1e-15);
        assert!(c.fit_rel < 1e-15);
    }
}
