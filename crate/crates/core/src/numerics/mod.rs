//! Exact combinatorial constants and certified special functions.

mod bessel;
mod gamma;
mod kloosterman;

use std::sync::{Mutex, OnceLock};

use rug::ops::Pow;
use rug::{Integer, Rational};

pub use bessel::{bessel_j, bessel_j_with_budget, Ball};
pub use gamma::{gamma_half, gamma_ratio, rising, HalfGamma};
pub use kloosterman::{kloosterman, kloosterman_real, mod_inverse, CosTable, KloostermanUnits};

/// Exact Bernoulli number `B_n` with `B_1 = -1/2`.
pub fn bernoulli(n: usize) -> Rational {
    static CACHE: OnceLock<Mutex<Vec<Rational>>> = OnceLock::new();
    let mut cache = CACHE
        .get_or_init(|| Mutex::new(vec![Rational::from(1)]))
        .lock()
        .expect("bernoulli cache poisoned");
    while cache.len() <= n {
        // sum_{j=0}^{m} C(m+1, j) B_j = 0
        let m = cache.len();
        let mut acc = Rational::new();
        for (j, b) in cache.iter().enumerate() {
            acc += Rational::from(b * binomial(m as u32 + 1, j as u32));
        }
        let bm = Rational::from(-acc / (m as u32 + 1));
        cache.push(bm);
    }
    cache[n].clone()
}

pub fn binomial(n: u32, k: u32) -> Integer {
    Integer::from(Integer::binomial_u(n, k))
}

pub fn factorial(n: u32) -> Integer {
    Integer::from(Integer::factorial(n))
}

/// `sigma_e(n)` for `n = 0..=upto` (with `sigma_e(0) = 0`).
pub fn divisor_sums(e: u32, upto: usize) -> Vec<Integer> {
    let mut out = vec![Integer::new(); upto + 1];
    for d in 1..=upto {
        let p = Integer::from(d).pow(e);
        for m in (d..=upto).step_by(d) {
            out[m] += &p;
        }
    }
    out
}

/// Divisors of `n` in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
