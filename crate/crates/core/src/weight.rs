//! Weights in `(1/2)Z` and the descriptor attached to a modular form.

use std::fmt;
use std::ops::{Add, Sub};

use rug::Rational;
use serde::{Deserialize, Serialize};

/// An element of `(1/2)Z`, stored as its double.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HalfInt(i64);

impl HalfInt {
    pub const HALF: HalfInt = HalfInt(1);

    pub const fn from_twice(twice: i64) -> Self {
        HalfInt(twice)
    }

    pub const fn int(n: i64) -> Self {
        HalfInt(2 * n)
    }

    pub const fn twice(self) -> i64 {
        self.0
    }

    pub fn is_integral(self) -> bool {
        self.0 % 2 == 0
    }

    /// The integer value, if integral.
    pub fn as_int(self) -> Option<i64> {
        self.is_integral().then_some(self.0 / 2)
    }

    pub fn to_rational(self) -> Rational {
        Rational::from((self.0, 2))
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / 2.0
    }
}

impl From<i64> for HalfInt {
    fn from(n: i64) -> Self {
        HalfInt::int(n)
    }
}

impl From<u32> for HalfInt {
    fn from(n: u32) -> Self {
        HalfInt::int(n as i64)
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 + rhs.0)
    }
}

impl Add<i64> for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: i64) -> HalfInt {
        HalfInt(self.0 + 2 * rhs)
    }
}

impl Sub<i64> for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: i64) -> HalfInt {
        HalfInt(self.0 - 2 * rhs)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integral() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Level {
    One,
    Four,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Multiplier {
    Trivial,
    /// `gamma -> theta(gamma tau) / theta(tau)` on `Gamma_0(4)`.
    Theta,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormDescriptor {
    pub weight: HalfInt,
    pub level: Level,
    pub multiplier: Multiplier,
    pub plus: bool,
}

impl FormDescriptor {
    pub fn level_one(k: u32) -> Self {
        Self {
            weight: HalfInt::from(k),
            level: Level::One,
            multiplier: Multiplier::Trivial,
            plus: false,
        }
    }

    /// Weight `lam + 1/2` in the plus space on `Gamma_0(4)`.
    pub fn plus_space(lam: u32) -> Self {
        Self {
            weight: HalfInt::from_twice(2 * lam as i64 + 1),
            level: Level::Four,
            multiplier: Multiplier::Theta,
            plus: true,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_display() {
        let k = HalfInt::HALF + 12;
        assert_eq!(k.twice(), 25);
        assert_eq!(k.to_string(), "25/2");
        assert_eq!(HalfInt::int(6).to_string(), "6");
        assert_eq!((k - 12).to_rational(), Rational::from((1, 2)));
        assert_eq!(HalfInt::int(3).as_int(), Some(3));
        assert_eq!(k.as_int(), None);
    }
}
