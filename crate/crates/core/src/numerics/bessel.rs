use rug::ops::Pow;
use rug::{Float, Integer};

use crate::error::{Error, Result};

/// A midpoint with an absolute radius.
#[derive(Clone, Debug, PartialEq)]
pub struct Ball {
    pub mid: Float,
    pub rad: f64,
}

const DEFAULT_TERM_BUDGET: usize = 20_000;

/// `J_order(x)` to absolute error at most `2^-prec`.
pub fn bessel_j(order: u32, x: &Float, prec: u32) -> Result<Ball> {
    bessel_j_with_budget(order, x, prec, DEFAULT_TERM_BUDGET)
}

/// Power series `sum_j (-1)^j (x/2)^(2j+order) / (j! (j+order)!)`.
///
/// The tail after the terms have started to shrink is alternating, so it is
/// bounded by the first omitted term. Cancellation is absorbed by raising the
/// working precision by the size of the largest term.
pub fn bessel_j_with_budget(order: u32, x: &Float, prec: u32, budget: usize) -> Result<Ball> {
    if !x.is_finite() || x.is_sign_negative() && !x.is_zero() {
        return Err(Error::InvalidArgument(format!("bessel_j needs a finite x >= 0, got {x}")));
    }
    if x.is_zero() {
        let v = if order == 0 { 1 } else { 0 };
        return Ok(Ball {
            mid: Float::with_val(prec, v),
            rad: 0.0,
        });
    }

    let half = x.to_f64() / 2.0;
    let nu = order as f64;
    // log2 of the largest term, from the f64 term recurrence.
    let log2_half = half.log2();
    let mut log2_t = nu * log2_half - ln_factorial(order) / std::f64::consts::LN_2;
    let mut log2_max = log2_t;
    let mut j = 0usize;
    while half * half > (j as f64 + 1.0) * (j as f64 + 1.0 + nu) {
        log2_t += 2.0 * log2_half - ((j as f64 + 1.0) * (j as f64 + 1.0 + nu)).log2();
        log2_max = log2_max.max(log2_t);
        j += 1;
        if j > budget {
            return Err(Error::Precision(format!(
                "J_{order}({half:.3e}*2) needs more than {budget} terms"
            )));
        }
    }
    let peak = j;
    let guard = 32 + (budget as f64).log2().ceil() as u32 * 2;
    let wp = prec + log2_max.max(0.0).ceil() as u32 + guard;

    let xw = Float::with_val(wp, x);
    let h = Float::with_val(wp, &xw / 2u32);
    let y = Float::with_val(wp, -Float::with_val(wp, h.square_ref()));
    let mut t = Float::with_val(wp, (&h).pow(order)) / Float::with_val(wp, Integer::from(Integer::factorial(order)));
    let mut sum = Float::new(wp);
    let target = 2f64.powi(-(prec as i32) - 2);
    let mut terms = 0usize;
    let mut max_seen: f64 = 0.0;
    loop {
        let tf = t.to_f64().abs();
        max_seen = max_seen.max(tf);
        if terms > peak && tf < target {
            break;
        }
        sum += &t;
        terms += 1;
        if terms > budget {
            return Err(Error::Precision(format!(
                "J_{order}(x) did not converge within {budget} terms"
            )));
        }
        let jj = terms as u64;
        t *= &y;
        t /= jj * (jj + order as u64);
        if t.is_zero() {
            break;
        }
    }
    // The omitted tail is below the first omitted term; each term carries
    // O(j) roundings relative to itself, and the summation O(J) more.
    let tail = t.to_f64().abs();
    let jf = terms.max(1) as f64;
    let scale = max_seen.max(f64::MIN_POSITIVE);
    let rounding = 2f64.powi(1 - wp as i32) * (4.0 * jf + 3.0) * jf * scale;
    let mid = Float::with_val(prec + 8, &sum);
    let to_prec = Float::with_val(wp, &mid - &sum).to_f64().abs();
    let rad = crate::qseries::up(tail + rounding + to_prec);
    if rad > 2f64.powi(-(prec as i32)) {
        return Err(Error::Precision(format!(
            "J_{order}(x): error bound {rad:e} exceeds 2^-{prec}"
        )));
    }
    Ok(Ball { mid, rad })
}

fn ln_factorial(n: u32) -> f64 {
    (1..=n).map(|i| (i as f64).ln()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn values_at_zero() {
        assert_eq!(bessel_j(0, &Float::new(64), 128).unwrap().mid, 1);
        assert_eq!(bessel_j(11, &Float::new(64), 128).unwrap().mid, 0);
    }

    #[test]
    fn small_argument_leading_term() {
        let x = Float::with_val(256, 0.01);
        let j = bessel_j(11, &x, 256).unwrap();
        let lead = Float::with_val(256, Float::with_val(256, &x / 2u32).pow(11u32))
            / Float::with_val(256, Integer::from(Integer::factorial(11)));
        let rel = Float::with_val(256, (j.mid.clone() - &lead) / &lead).abs().to_f64();
        // Next term is (x/2)^2 / 12 relative to the first.
        assert!(rel < 1e-4, "{rel}");
        assert!((rel - 0.005f64.powi(2) / 12.0).abs() < 1e-9);
    }

    #[test]
    fn known_value() {
        // J_0(1) = 0.7651976865579665514497175261026632209093...
        let j = bessel_j(0, &Float::with_val(128, 1), 128).unwrap();
        let expect = Float::with_val(128, Float::parse("0.7651976865579665514497175261026632209093").unwrap());
        assert!(Float::with_val(128, j.mid - expect).abs() < 1e-38);
    }

    #[test]
    fn budget_is_enforced() {
        let x = Float::with_val(64, 1e6);
        assert!(matches!(
            bessel_j_with_budget(3, &x, 64, 100),
            Err(Error::Precision(_))
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn bound_holds_against_higher_precision(order in 0u32..30, x in 0.0f64..60.0, prec in 64u32..300) {
            let xf = Float::with_val(64, x);
            let a = bessel_j(order, &xf, prec).unwrap();
            let b = bessel_j(order, &xf, prec + 64).unwrap();
            let diff = Float::with_val(prec + 64, &a.mid - &b.mid).abs().to_f64();
            prop_assert!(diff <= a.rad + b.rad, "{} > {}", diff, a.rad + b.rad);
            prop_assert!(a.rad <= 2f64.powi(-(prec as i32)));
        }
    }
}
