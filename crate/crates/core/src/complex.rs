//! A minimal arbitrary-precision complex number over [`rug::Float`].

use std::fmt;

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

#[derive(Clone, PartialEq)]
pub struct BigComplex {
    pub re: Float,
    pub im: Float,
}

impl fmt::Debug for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}i)", self.re.to_f64(), self.im.to_f64())
    }
}

impl BigComplex {
    pub fn zero(prec: u32) -> Self {
        Self {
            re: Float::new(prec),
            im: Float::new(prec),
        }
    }

    pub fn one(prec: u32) -> Self {
        Self::from_real(Float::with_val(prec, 1))
    }

    pub fn from_real(re: Float) -> Self {
        let im = Float::new(re.prec());
        Self { re, im }
    }

    pub fn from_parts(re: Float, im: Float) -> Self {
        Self { re, im }
    }

    pub fn from_f64(prec: u32, re: f64, im: f64) -> Self {
        Self {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
        }
    }

    pub fn from_rational(prec: u32, r: &Rational) -> Self {
        Self::from_real(Float::with_val(prec, r))
    }

    pub fn from_integer(prec: u32, r: &Integer) -> Self {
        Self::from_real(Float::with_val(prec, r))
    }

    /// `i^e` for any integer `e`.
    pub fn i_pow(prec: u32, e: i64) -> Self {
        match e.rem_euclid(4) {
            0 => Self::from_f64(prec, 1.0, 0.0),
            1 => Self::from_f64(prec, 0.0, 1.0),
            2 => Self::from_f64(prec, -1.0, 0.0),
            _ => Self::from_f64(prec, 0.0, -1.0),
        }
    }

    /// `exp(2 pi i t)` for real `t`.
    pub fn expi_turns(t: &Float) -> Self {
        let prec = t.prec();
        let two_pi = Float::with_val(prec, Constant::Pi) * 2u32;
        let angle = two_pi * t;
        let (s, c) = angle.sin_cos(Float::new(prec));
        Self { re: c, im: s }
    }

    /// `exp(2 pi i tau / w)` for `tau = x + i y`.
    pub fn q_power(x: &Float, y: &Float, width: u32) -> Self {
        let prec = x.prec();
        let two_pi_w = Float::with_val(prec, Constant::Pi) * 2u32 / width;
        let modulus = Float::with_val(prec, -(two_pi_w.clone() * y)).exp();
        let angle = two_pi_w * x;
        let (s, c) = angle.sin_cos(Float::new(prec));
        Self {
            re: c * &modulus,
            im: s * modulus,
        }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn add_ref(&self, other: &Self) -> Self {
        Self {
            re: Float::with_val(self.prec(), &self.re + &other.re),
            im: Float::with_val(self.prec(), &self.im + &other.im),
        }
    }

    pub fn sub_ref(&self, other: &Self) -> Self {
        Self {
            re: Float::with_val(self.prec(), &self.re - &other.re),
            im: Float::with_val(self.prec(), &self.im - &other.im),
        }
    }

    pub fn add_assign_ref(&mut self, other: &Self) {
        self.re += &other.re;
        self.im += &other.im;
    }

    pub fn sub_assign_ref(&mut self, other: &Self) {
        self.re -= &other.re;
        self.im -= &other.im;
    }

    pub fn neg(&self) -> Self {
        Self {
            re: Float::with_val(self.prec(), -&self.re),
            im: Float::with_val(self.prec(), -&self.im),
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            re: self.re.clone(),
            im: Float::with_val(self.prec(), -&self.im),
        }
    }

    pub fn mul_ref(&self, other: &Self) -> Self {
        let prec = self.prec();
        let re = Float::with_val(prec, &self.re * &other.re) - Float::with_val(prec, &self.im * &other.im);
        let im = Float::with_val(prec, &self.re * &other.im) + Float::with_val(prec, &self.im * &other.re);
        Self { re, im }
    }

    /// `self * conj(other)`.
    pub fn mul_conj(&self, other: &Self) -> Self {
        let prec = self.prec();
        let re = Float::with_val(prec, &self.re * &other.re) + Float::with_val(prec, &self.im * &other.im);
        let im = Float::with_val(prec, &self.im * &other.re) - Float::with_val(prec, &self.re * &other.im);
        Self { re, im }
    }

    /// Fused `self += a * b`.
    pub fn add_mul(&mut self, a: &Self, b: &Self) {
        let prec = self.prec();
        self.re += Float::with_val(prec, &a.re * &b.re);
        self.re -= Float::with_val(prec, &a.im * &b.im);
        self.im += Float::with_val(prec, &a.re * &b.im);
        self.im += Float::with_val(prec, &a.im * &b.re);
    }

    pub fn mul_float(&self, s: &Float) -> Self {
        Self {
            re: Float::with_val(self.prec(), &self.re * s),
            im: Float::with_val(self.prec(), &self.im * s),
        }
    }

    pub fn mul_rational(&self, s: &Rational) -> Self {
        Self {
            re: Float::with_val(self.prec(), &self.re * s),
            im: Float::with_val(self.prec(), &self.im * s),
        }
    }

    pub fn mul_integer(&self, s: &Integer) -> Self {
        Self {
            re: Float::with_val(self.prec(), &self.re * s),
            im: Float::with_val(self.prec(), &self.im * s),
        }
    }

    /// Multiplication by `i^e`, exact.
    pub fn mul_i_pow(&self, e: i64) -> Self {
        match e.rem_euclid(4) {
            0 => self.clone(),
            1 => Self {
                re: Float::with_val(self.prec(), -&self.im),
                im: self.re.clone(),
            },
            2 => self.neg(),
            _ => Self {
                re: self.im.clone(),
                im: Float::with_val(self.prec(), -&self.re),
            },
        }
    }

    pub fn div_ref(&self, other: &Self) -> Self {
        let prec = self.prec();
        let den = other.norm_sqr();
        let num = self.mul_conj(other);
        Self {
            re: Float::with_val(prec, &num.re / &den),
            im: Float::with_val(prec, &num.im / &den),
        }
    }

    pub fn norm_sqr(&self) -> Float {
        let prec = self.prec();
        Float::with_val(prec, self.re.square_ref()) + Float::with_val(prec, self.im.square_ref())
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.prec(), self.re.hypot_ref(&self.im))
    }

    /// Magnitude as an `f64` (may be infinite for out-of-range values).
    pub fn abs_f64(&self) -> f64 {
        self.abs().to_f64()
    }

    pub fn powu(&self, e: u32) -> Self {
        let mut acc = Self::one(self.prec());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_ref(&base);
            }
            base = base.mul_ref(&base);
            e >>= 1;
        }
        acc
    }

    /// Principal branch of `self^e` for real `e`.
    pub fn powf(&self, e: &Float) -> Self {
        let prec = self.prec();
        let arg = Float::with_val(prec, self.im.atan2_ref(&self.re));
        let log_r = Float::with_val(prec, self.norm_sqr().ln()) / 2u32;
        let modulus = Float::with_val(prec, log_r * e).exp();
        let angle = Float::with_val(prec, arg * e);
        let (s, c) = angle.sin_cos(Float::new(prec));
        Self {
            re: c * &modulus,
            im: s * modulus,
        }
    }

    pub fn set_prec(&mut self, prec: u32) {
        self.re.set_prec(prec);
        self.im.set_prec(prec);
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        let mut c = self.clone();
        c.set_prec(prec);
        c
    }
}

/// `2^(e/2)` as a float.
pub fn sqrt2_pow(prec: u32, e: i32) -> Float {
    let half = Float::with_val(prec, Float::with_val(prec, 2).sqrt());
    half.pow(e)
}
