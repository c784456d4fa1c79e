use rug::float::Constant;
use rug::Float;

use crate::complex::BigComplex;

/// Inverse of `a` modulo `c`, if it exists. Modulo 1 everything inverts to 0.
pub fn mod_inverse(a: u64, c: u64) -> Option<u64> {
    if c == 1 {
        return Some(0);
    }
    let (mut r0, mut r1) = (c as i128, (a % c) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return None;
    }
    Some(s0.rem_euclid(c as i128) as u64)
}

/// Residues `d mod c` coprime to `c`, paired with their inverses.
#[derive(Clone, Debug)]
pub struct KloostermanUnits {
    c: u64,
    pairs: Vec<(u64, u64)>,
}

impl KloostermanUnits {
    pub fn new(c: u64) -> Self {
        assert!(c >= 1, "modulus must be positive");
        let pairs = (0..c)
            .filter_map(|d| mod_inverse(d, c).map(|dbar| (d, dbar)))
            .collect();
        Self { c, pairs }
    }

    pub fn modulus(&self) -> u64 {
        self.c
    }

    /// How often each residue `r = m d + n dbar mod c` occurs.
    pub fn residue_counts(&self, m: i64, n: i64) -> Vec<u64> {
        let c = self.c as i128;
        let (m, n) = ((m as i128).rem_euclid(c), (n as i128).rem_euclid(c));
        let mut counts = vec![0u64; self.c as usize];
        for &(d, dbar) in &self.pairs {
            let r = (m * d as i128 + n * dbar as i128) % c;
            counts[r as usize] += 1;
        }
        counts
    }

    /// `S(m, n; c)` as a real number; the sine parts cancel under `d -> -d`.
    pub fn sum(&self, m: i64, n: i64, table: &CosTable) -> Float {
        assert_eq!(table.c, self.c, "cosine table modulus");
        let counts = self.residue_counts(m, n);
        let mut acc = Float::new(table.prec);
        for (r, &k) in counts.iter().enumerate() {
            if k != 0 {
                acc += Float::with_val(table.prec, &table.cos[r] * k);
            }
        }
        acc
    }
}

/// `cos(2 pi r / c)` for `r = 0..c`.
#[derive(Clone, Debug)]
pub struct CosTable {
    c: u64,
    prec: u32,
    cos: Vec<Float>,
}

impl CosTable {
    pub fn new(c: u64, prec: u32) -> Self {
        let two_pi = Float::with_val(prec, Constant::Pi) * 2u32;
        let cos = (0..c)
            .map(|r| (Float::with_val(prec, &two_pi * r) / c).cos())
            .collect();
        Self { c, prec, cos }
    }
}

/// `S(m, n; c) = sum_{d mod c, (d, c) = 1} e((m d + n dbar) / c)` by direct
/// enumeration, keeping the imaginary part.
pub fn kloosterman(m: i64, n: i64, c: u64, prec: u32) -> BigComplex {
    let units = KloostermanUnits::new(c);
    let counts = units.residue_counts(m, n);
    let mut acc = BigComplex::zero(prec);
    for (r, &k) in counts.iter().enumerate() {
        if k != 0 {
            let t = Float::with_val(prec, r) / c;
            acc.add_assign_ref(&BigComplex::expi_turns(&t).mul_integer(&k.into()));
        }
    }
    acc
}

pub fn kloosterman_real(m: i64, n: i64, c: u64, prec: u32) -> Float {
    KloostermanUnits::new(c).sum(m, n, &CosTable::new(c, prec))
}
