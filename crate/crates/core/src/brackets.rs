//! Rankin-Cohen brackets on q-expansions.
//!
//! With `D = (2 pi i)^-1 d/dtau` acting as `a(n) -> (n/w) a(n)`,
//!
//! ```text
//! [f, g]_nu = sum_i (-1)^(nu-i) C(nu, i)
//!             Gamma(k1+nu) Gamma(k2+nu) / (Gamma(k1+i) Gamma(k2+nu-i))
//!             D^i f  D^(nu-i) g.
//! ```

use rug::Rational;

use crate::error::{Error, Result};
use crate::halfint::{theta, PlusForm};
use crate::numerics::{binomial, gamma_half};
use crate::qseries::{ExactQSeries, Expansion, FloatQSeries};
use crate::weight::HalfInt;

/// The `nu + 1` rational weights of `D^i f D^(nu-i) g`.
pub fn bracket_coefficients(k1: HalfInt, k2: HalfInt, nu: u32) -> Result<Vec<Rational>> {
    if k1.twice() <= 0 || k2.twice() <= 0 {
        return Err(Error::InvalidWeight(format!("bracket weights must be positive, got {k1} and {k2}")));
    }
    let nu_i = nu as i64;
    (0..=nu)
        .map(|i| {
            let g = gamma_half(k1 + nu_i)? * gamma_half(k2 + nu_i)?
                / (gamma_half(k1 + i as i64)? * gamma_half(k2 + (nu_i - i as i64))?);
            let mut c = g.to_rational()? * binomial(nu, i);
            if (nu - i) % 2 == 1 {
                c = -c;
            }
            Ok(c)
        })
        .collect()
}

pub fn bracket_weight(k1: HalfInt, k2: HalfInt, nu: u32) -> HalfInt {
    k1 + k2 + 2 * nu as i64
}

fn derivatives_exact(f: &ExactQSeries, nu: u32) -> Vec<ExactQSeries> {
    let mut out = vec![f.clone()];
    for _ in 0..nu {
        let next = out.last().unwrap().qderiv();
        out.push(next);
    }
    out
}

pub fn rc_bracket(f1: &ExactQSeries, k1: HalfInt, f2: &ExactQSeries, k2: HalfInt, nu: u32) -> Result<ExactQSeries> {
    let coeffs = bracket_coefficients(k1, k2, nu)?;
    let d1 = derivatives_exact(f1, nu);
    let d2 = derivatives_exact(f2, nu);
    let mut acc: Option<ExactQSeries> = None;
    for (i, c) in coeffs.iter().enumerate() {
        let term = d1[i].mul(&d2[nu as usize - i])?.scale_rational(c);
        acc = Some(match acc {
            Some(a) => a.add(&term)?,
            None => term,
        });
    }
    Ok(acc.expect("at least one term"))
}

pub fn rc_bracket_float(f1: &FloatQSeries, k1: HalfInt, f2: &FloatQSeries, k2: HalfInt, nu: u32) -> Result<FloatQSeries> {
    let coeffs = bracket_coefficients(k1, k2, nu)?;
    let mut d1 = vec![f1.clone()];
    let mut d2 = vec![f2.clone()];
    for _ in 0..nu {
        d1.push(d1.last().unwrap().qderiv());
        d2.push(d2.last().unwrap().qderiv());
    }
    let mut acc: Option<FloatQSeries> = None;
    for (i, c) in coeffs.iter().enumerate() {
        if *c == 0 {
            continue;
        }
        let term = d1[i].mul(&d2[nu as usize - i])?.scale_rational(c);
        acc = Some(match acc {
            Some(a) => a.add(&term)?,
            None => term,
        });
    }
    Ok(acc.unwrap_or_else(|| FloatQSeries::zero(f1.width(), f1.trunc().min(f2.trunc()), f1.prec())))
}

/// Bracket of either kind of series; exact only when both inputs are.
pub fn rc_bracket_any(f1: &Expansion, k1: HalfInt, f2: &Expansion, k2: HalfInt, nu: u32, prec: u32) -> Result<Expansion> {
    match (f1, f2) {
        (Expansion::Exact(a), Expansion::Exact(b)) => Ok(Expansion::Exact(rc_bracket(a, k1, b, k2, nu)?)),
        _ => Ok(Expansion::Float(rc_bracket_float(
            &f1.to_float(prec),
            k1,
            &f2.to_float(prec),
            k2,
            nu,
        )?)),
    }
}

/// `[theta(tau), h(4 tau)]_nu` for a level-1 form `h` of weight `k`, as a
/// plus-space form of weight `k + 2 nu + 1/2`.
pub fn bracket_theta_dilated(h: &ExactQSeries, k: u32, nu: u32) -> Result<PlusForm> {
    bracket_theta_dilated_any(&Expansion::Exact(h.clone()), k, nu, 0)
}

pub fn bracket_theta_dilated_any(h: &Expansion, k: u32, nu: u32, prec: u32) -> Result<PlusForm> {
    if h.width() != 1 {
        return Err(Error::WidthMismatch { left: h.width(), right: 1 });
    }
    let trunc = 4 * h.trunc();
    let dilated = match h {
        Expansion::Exact(s) => Expansion::Exact(s.dilate4()),
        Expansion::Float(s) => Expansion::Float(s.dilate4()),
    };
    let th = Expansion::Exact(theta(trunc));
    let series = rc_bracket_any(&th, HalfInt::HALF, &dilated, HalfInt::from(k), nu, prec)?;
    PlusForm::new(k + 2 * nu, series, format!("[theta, h(4 tau)]_{nu}, h of weight {k}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::level1::{delta, eisenstein};
    use crate::numerics::gamma_ratio;
    use proptest::prelude::*;

    fn q(n: i64) -> Rational {
        Rational::from(n)
    }

    #[test]
    fn nu_zero_is_the_product() {
        let a = eisenstein(4, 20).unwrap();
        let b = delta(20);
        let br = rc_bracket(&a, HalfInt::int(4), &b, HalfInt::int(12), 0).unwrap();
        assert_eq!(br, a.mul(&b).unwrap());
    }

    #[test]
    fn odd_bracket_of_a_form_with_itself_vanishes() {
        let d = delta(25);
        let br = rc_bracket(&d, HalfInt::int(12), &d, HalfInt::int(12), 1).unwrap();
        assert!(br.is_zero());
        let br3 = rc_bracket(&d, HalfInt::int(12), &d, HalfInt::int(12), 3).unwrap();
        assert!(br3.is_zero());
    }

    #[test]
    fn theta_bracket_matches_the_coefficient_formula() {
        let d = delta(20);
        for nu in 0..=3u32 {
            let g = bracket_theta_dilated(&d, 12, nu).unwrap();
            let g = g.series.as_exact().unwrap().clone();
            for n in 0..=60u64 {
                assert_eq!(g.coeff(n).unwrap(), coefficient_formula(&d, nu, n), "nu = {nu}, n = {n}");
            }
        }
    }

    /// `sum_mu (-1)^(nu-mu) C(nu,mu) [Gamma ratio] sum_r r^(2mu) (n-r^2)^(nu-mu) tau((n-r^2)/4)`
    fn coefficient_formula(d: &ExactQSeries, nu: u32, n: u64) -> Rational {
        let mut total = Rational::new();
        for mu in 0..=nu {
            let c = gamma_ratio(HalfInt::HALF + nu as i64, HalfInt::HALF + mu as i64).unwrap()
                * gamma_ratio(HalfInt::int(12 + nu as i64), HalfInt::int(12 + (nu - mu) as i64)).unwrap()
                * binomial(nu, mu);
            let sign = if (nu - mu) % 2 == 1 { -1 } else { 1 };
            let mut inner = Rational::new();
            let rmax = (n as f64).sqrt() as i64 + 1;
            for r in -rmax..=rmax {
                let rest = n as i64 - r * r;
                if rest >= 0 && rest % 4 == 0 {
                    let t = d.coeff((rest / 4) as u64).unwrap();
                    inner += q(r * r).pow_u(mu) * q(rest).pow_u(nu - mu) * t;
                }
            }
            total += c * inner * sign;
        }
        total
    }

    trait PowU {
        fn pow_u(self, e: u32) -> Rational;
    }
    impl PowU for Rational {
        fn pow_u(self, e: u32) -> Rational {
            (0..e).fold(Rational::from(1), |acc, _| acc * &self)
        }
    }

    #[test]
    fn theta_bracket_small_coefficients() {
        let g = bracket_theta_dilated(&delta(10), 12, 0).unwrap();
        let s = g.series.as_exact().unwrap();
        assert_eq!(s.coeff(4).unwrap(), 1);
        assert_eq!(s.coeff(5).unwrap(), 2);
        assert_eq!(s.coeff(6).unwrap(), 0);
    }

    #[test]
    fn half_integral_ratios() {
        for nu in 0..=8u32 {
            for i in 0..=nu {
                let mut prod = Rational::from(1);
                for j in i..nu {
                    prod *= Rational::from((2 * j + 1, 2));
                }
                let g = gamma_half(HalfInt::HALF + nu as i64).unwrap() / gamma_half(HalfInt::HALF + i as i64).unwrap();
                assert_eq!(g.to_rational().unwrap(), prod);
            }
        }
    }

    #[test]
    fn brackets_of_level_one_forms_are_modular() {
        use crate::level1::{miller_basis, SpaceKind};
        let a = eisenstein(4, 30).unwrap();
        let b = eisenstein(6, 30).unwrap();
        for nu in 0..=3u32 {
            let br = rc_bracket(&a, HalfInt::int(4), &b, HalfInt::int(6), nu).unwrap();
            let space = miller_basis(10 + 2 * nu, SpaceKind::Full, 30).unwrap();
            let (_, residual) = space.coordinates(&br).unwrap();
            assert_eq!(residual, 0, "nu = {nu}");
        }
    }

    #[test]
    fn exact_and_float_brackets_agree() {
        let a = eisenstein(4, 15).unwrap();
        let b = delta(15);
        let ex = rc_bracket(&a, HalfInt::int(4), &b, HalfInt::int(12), 2).unwrap();
        let fl = rc_bracket_float(
            &FloatQSeries::from_exact(&a, 200),
            HalfInt::int(4),
            &FloatQSeries::from_exact(&b, 200),
            HalfInt::int(12),
            2,
        )
        .unwrap();
        assert!(fl.distance(&ex).unwrap() <= fl.err());
    }

    fn sparse() -> impl Strategy<Value = ExactQSeries> {
        prop::collection::vec((0u64..12, -20i64..20, 1i64..5), 0..6).prop_map(|t| {
            ExactQSeries::from_terms(1, 11, t.into_iter().map(|(n, p, d)| (n, Rational::from((p, d)))))
        })
    }

    proptest! {
        #[test]
        fn bilinear(a in sparse(), b in sparse(), c in sparse(), s in -5i64..5, nu in 0u32..4) {
            let (k1, k2) = (HalfInt::from_twice(9), HalfInt::int(6));
            let lhs = rc_bracket(&a.add(&b.scale_rational(&q(s))).unwrap(), k1, &c, k2, nu).unwrap();
            let rhs = rc_bracket(&a, k1, &c, k2, nu).unwrap()
                .add(&rc_bracket(&b, k1, &c, k2, nu).unwrap().scale_rational(&q(s))).unwrap();
            prop_assert_eq!(lhs, rhs);
            let lhs2 = rc_bracket(&c, k2, &a.add(&b).unwrap(), k1, nu).unwrap();
            let rhs2 = rc_bracket(&c, k2, &a, k1, nu).unwrap().add(&rc_bracket(&c, k2, &b, k1, nu).unwrap()).unwrap();
            prop_assert_eq!(lhs2, rhs2);
        }
    }
}
