//! Verifier selection and `key = value` configuration files.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use super::context::Context;
use super::identities::*;
use super::report::IdentityReport;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Identity {
    Prop21,
    Prop22Comb,
    Prop22Inner,
    Prop23,
    Thm24,
    Cor25,
}

impl Identity {
    pub const ALL: [Identity; 6] = [
        Identity::Prop21,
        Identity::Prop22Comb,
        Identity::Prop22Inner,
        Identity::Prop23,
        Identity::Thm24,
        Identity::Cor25,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Identity::Prop21 => "prop21",
            Identity::Prop22Comb => "prop22-comb",
            Identity::Prop22Inner => "prop22-inner",
            Identity::Prop23 => "prop23",
            Identity::Thm24 => "thm24",
            Identity::Cor25 => "cor25",
        }
    }

    /// Relative tolerance used when none is configured. The exact path of
    /// `prop21` ignores it: there the residual must vanish.
    pub fn default_tolerance(self) -> f64 {
        match self {
            Identity::Prop21 => 1e-10,
            Identity::Prop22Comb => 1e-6,
            Identity::Prop22Inner | Identity::Thm24 | Identity::Cor25 => 1e-5,
            Identity::Prop23 => 1e-4,
        }
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Identity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Identity::ALL
            .into_iter()
            .find(|i| i.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown identity {s:?}")))
    }
}

/// Settings shared by the command line and configuration files. Unset
/// fields fall back to per-identity defaults.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Config {
    pub k: Option<u32>,
    pub k1: Option<u32>,
    pub k2: Option<u32>,
    pub nu: Option<u32>,
    pub m: Option<u64>,
    pub trunc: Option<u64>,
    pub prec_bits: Option<u32>,
    pub tol: Option<f64>,
    pub cache_dir: Option<PathBuf>,
    pub json: Option<bool>,
}

fn parse_value<T: FromStr>(key: &str, value: &str, line: usize) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Parse(format!("line {line}: bad value {value:?} for {key}")))
}

impl Config {
    /// Reads `key = value` lines; `#` starts a comment. Keys are the long
    /// flag names, with `-` or `_`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut c = Config::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", i + 1)))?;
            let key = key.trim().replace('_', "-");
            let value = value.trim();
            let n = i + 1;
            match key.as_str() {
                "k" => c.k = Some(parse_value(&key, value, n)?),
                "k1" => c.k1 = Some(parse_value(&key, value, n)?),
                "k2" => c.k2 = Some(parse_value(&key, value, n)?),
                "nu" => c.nu = Some(parse_value(&key, value, n)?),
                "m" => c.m = Some(parse_value(&key, value, n)?),
                "trunc" => c.trunc = Some(parse_value(&key, value, n)?),
                "prec-bits" => c.prec_bits = Some(parse_value(&key, value, n)?),
                "tol" => c.tol = Some(parse_value(&key, value, n)?),
                "cache-dir" => c.cache_dir = Some(PathBuf::from(value)),
                "json" => c.json = Some(parse_value(&key, value, n)?),
                _ => return Err(Error::Parse(format!("line {n}: unknown key {key:?}"))),
            }
        }
        Ok(c)
    }

    /// `self` with every field set in `other` replaced.
    pub fn overlay(&self, other: &Config) -> Config {
        Config {
            k: other.k.or(self.k),
            k1: other.k1.or(self.k1),
            k2: other.k2.or(self.k2),
            nu: other.nu.or(self.nu),
            m: other.m.or(self.m),
            trunc: other.trunc.or(self.trunc),
            prec_bits: other.prec_bits.or(self.prec_bits),
            tol: other.tol.or(self.tol),
            cache_dir: other.cache_dir.clone().or_else(|| self.cache_dir.clone()),
            json: other.json.or(self.json),
        }
    }
}

/// Runs one verifier with the parameters in `cfg`, defaulting to the
/// smallest interesting case.
pub fn run(ctx: &Context, identity: Identity, cfg: &Config) -> Result<IdentityReport> {
    let tol = cfg.tol.unwrap_or(identity.default_tolerance());
    let nu = cfg.nu.unwrap_or(0);
    let m = cfg.m.unwrap_or(1);
    let k = cfg.k.unwrap_or(12);
    match identity {
        Identity::Prop21 => verify_prop21(ctx, k, nu, cfg.trunc.unwrap_or(60), tol),
        Identity::Prop22Comb => verify_prop22_combination(
            ctx,
            cfg.k1.unwrap_or(4),
            cfg.k2.unwrap_or(12),
            nu,
            m,
            cfg.trunc.unwrap_or(10),
            tol,
        ),
        Identity::Prop22Inner => verify_prop22_inner(ctx, cfg.k1.unwrap_or(4), cfg.k2.unwrap_or(12), nu, m, tol),
        Identity::Prop23 => verify_prop23(ctx, k, nu, m, tol),
        Identity::Thm24 => verify_thm24(ctx, k, nu, m, cfg.trunc.unwrap_or(40), tol),
        Identity::Cor25 => verify_cor25(ctx, k, nu, m, cfg.trunc.unwrap_or(40), tol),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_overlay() {
        let file = Config::parse("# sweep\nk = 16\nnu=1\nprec_bits = 192\ncache-dir = /tmp/x\njson = true\n").unwrap();
        assert_eq!(file.k, Some(16));
        assert_eq!(file.prec_bits, Some(192));
        assert_eq!(file.json, Some(true));
        let flags = Config {
            k: Some(12),
            ..Default::default()
        };
        let merged = file.overlay(&flags);
        assert_eq!(merged.k, Some(12));
        assert_eq!(merged.nu, Some(1));
        assert_eq!(merged.cache_dir, Some(PathBuf::from("/tmp/x")));
    }

    #[test]
    fn parse_errors() {
        assert!(Config::parse("k 12").is_err());
        assert!(Config::parse("k = twelve").is_err());
        assert!(Config::parse("colour = red").is_err());
    }

    #[test]
    fn identity_names_round_trip() {
        for i in Identity::ALL {
            assert_eq!(i.name().parse::<Identity>().unwrap(), i);
        }
        assert!("thm25".parse::<Identity>().is_err());
    }
}
