use std::ops::{Div, Mul};

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Rational};

use crate::error::{Error, Result};
use crate::weight::HalfInt;

/// `Gamma(x)` for `x` in `(1/2)Z`, kept as `rational * pi^(sqrt_pi / 2)`.
///
/// Single Gamma values carry `sqrt_pi` in `{0, 1}`; products and quotients
/// accumulate it, and a ratio is rational exactly when it returns to zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfGamma {
    pub rational: Rational,
    pub sqrt_pi: i32,
}

impl HalfGamma {
    pub fn to_rational(&self) -> Result<Rational> {
        if self.sqrt_pi != 0 {
            return Err(Error::SqrtPiMismatch(self.sqrt_pi));
        }
        Ok(self.rational.clone())
    }

    pub fn to_float(&self, prec: u32) -> Float {
        let pi = Float::with_val(prec, Constant::Pi);
        let root = Float::with_val(prec, pi.sqrt_ref());
        Float::with_val(prec, &self.rational) * root.pow(self.sqrt_pi)
    }
}

impl Mul for HalfGamma {
    type Output = HalfGamma;
    fn mul(self, rhs: HalfGamma) -> HalfGamma {
        HalfGamma {
            rational: self.rational * rhs.rational,
            sqrt_pi: self.sqrt_pi + rhs.sqrt_pi,
        }
    }
}

impl Div for HalfGamma {
    type Output = HalfGamma;
    fn div(self, rhs: HalfGamma) -> HalfGamma {
        HalfGamma {
            rational: self.rational / rhs.rational,
            sqrt_pi: self.sqrt_pi - rhs.sqrt_pi,
        }
    }
}

/// Rising factorial `a (a+1) ... (a+n-1)`.
pub fn rising(a: &Rational, n: u32) -> Rational {
    let mut acc = Rational::from(1);
    let mut t = a.clone();
    for _ in 0..n {
        acc *= &t;
        t += 1;
    }
    acc
}

pub fn gamma_half(x: HalfInt) -> Result<HalfGamma> {
    if x.twice() <= 0 {
        return Err(Error::InvalidArgument(format!("Gamma({x}) is not defined here")));
    }
    if x.is_integral() {
        // Gamma(1) = 1, then upward.
        let n = (x.twice() / 2) as u32;
        Ok(HalfGamma {
            rational: rising(&Rational::from(1), n - 1),
            sqrt_pi: 0,
        })
    } else {
        // Gamma(1/2) = sqrt(pi), then upward.
        let n = ((x.twice() - 1) / 2) as u32;
        Ok(HalfGamma {
            rational: rising(&Rational::from((1, 2)), n),
            sqrt_pi: 1,
        })
    }
}

/// `Gamma(a) / Gamma(b)`, which must be rational.
pub fn gamma_ratio(a: HalfInt, b: HalfInt) -> Result<Rational> {
    (gamma_half(a)? / gamma_half(b)?).to_rational()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_values() {
        let g = gamma_half(HalfInt::HALF).unwrap();
        assert_eq!((g.rational.clone(), g.sqrt_pi), (Rational::from(1), 1));
        let g = gamma_half(HalfInt::from_twice(5)).unwrap();
        assert_eq!((g.rational, g.sqrt_pi), (Rational::from((3, 4)), 1));
        let g = gamma_half(HalfInt::int(4)).unwrap();
        assert_eq!((g.rational, g.sqrt_pi), (Rational::from(6), 0));
        assert!(gamma_half(HalfInt::int(0)).is_err());
        assert!(gamma_half(HalfInt::from_twice(-1)).is_err());
    }

    #[test]
    fn recurrence_is_exact() {
        for twice in 1..40 {
            let x = HalfInt::from_twice(twice);
            let lhs = gamma_half(x + 1).unwrap();
            let rhs = gamma_half(x).unwrap();
            assert_eq!(lhs.sqrt_pi, rhs.sqrt_pi);
            assert_eq!(lhs.rational, rhs.rational * x.to_rational());
        }
    }

    #[test]
    fn half_integral_ratios_are_rising_products() {
        for nu in 0..=8 {
            for i in 0..=nu {
                let r = gamma_ratio(HalfInt::HALF + nu, HalfInt::HALF + i).unwrap();
                let mut prod = Rational::from(1);
                for j in i..nu {
                    prod *= Rational::from((2 * j + 1, 2));
                }
                assert_eq!(r, prod);
            }
        }
        assert!(matches!(
            gamma_ratio(HalfInt::HALF, HalfInt::int(3)),
            Err(Error::SqrtPiMismatch(1))
        ));
    }

    #[test]
    fn to_float_matches_mpfr_gamma() {
        let x = HalfInt::from_twice(13);
        let exact = gamma_half(x).unwrap().to_float(200);
        let direct = Float::with_val(200, Float::with_val(200, 6.5).gamma());
        let rel = Float::with_val(200, (exact - &direct) / direct).abs();
        assert!(rel < 1e-55);
    }
}
