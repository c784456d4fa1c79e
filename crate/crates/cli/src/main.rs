use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context as _, Result};
use clap::{Args, Parser, Subcommand};
use rankin_cohen::brackets::rc_bracket;
use rankin_cohen::harness::{run, Cache, Config, Context, Identity, HARNESS_PREC};
use rankin_cohen::level1::{dim_cusp, eisenstein, miller_basis, SpaceKind};
use rankin_cohen::poincare::poincare_eigen;
use rankin_cohen::qseries::{Expansion, SeriesRecord};
use rankin_cohen::shimura::shimura1;
use rankin_cohen::{ExactQSeries, FloatQSeries, HalfInt};
use serde_json::json;

const CACHE_ENV: &str = "RCB_CACHE_DIR";

/// Rankin-Cohen brackets, Shimura lifts, Poincare series and Petersson
/// norms on truncated q-expansions, and numerical checks of the identities
/// relating them.
#[derive(Parser)]
#[command(name = "rcb", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Clone, Default)]
struct Common {
    #[arg(long, global = true)]
    k: Option<u32>,
    #[arg(long, global = true)]
    k1: Option<u32>,
    #[arg(long, global = true)]
    k2: Option<u32>,
    #[arg(long, global = true)]
    nu: Option<u32>,
    #[arg(long, global = true)]
    m: Option<u64>,
    #[arg(long, global = true)]
    trunc: Option<u64>,
    #[arg(long = "prec-bits", global = true)]
    prec_bits: Option<u32>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Defaults to $RCB_CACHE_DIR; no cache when neither is set.
    #[arg(long = "cache-dir", global = true)]
    cache_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    json: bool,
    /// File of `key = value` lines with the same keys as the flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Miller basis of M_k (or S_k with --cusp).
    Basis {
        #[arg(long)]
        cusp: bool,
    },
    /// Normalised Hecke eigenforms of S_k.
    Eigenforms {
        /// Also compute Petersson norms.
        #[arg(long)]
        norms: bool,
    },
    /// [F1, F2]_nu with F_i = E_{k_i}, or the first cusp basis form with --cusp1/--cusp2.
    Bracket {
        #[arg(long)]
        cusp1: bool,
        #[arg(long)]
        cusp2: bool,
    },
    /// First Shimura lift of the plus eigenbasis of weight k + 1/2.
    Shimura,
    /// Poincare series P_{k,m}.
    Poincare {
        /// Sum the eigenform expansion instead of the Kloosterman series.
        #[arg(long)]
        eigen: bool,
    },
    /// Petersson norms: eigenforms of S_k, or with --plus the plus eigenbasis of weight k + 1/2.
    Norm {
        #[arg(long)]
        plus: bool,
    },
    /// Check identities: prop21, prop22-comb, prop22-inner, prop23, thm24, cor25, or all.
    Verify {
        #[arg(required = true)]
        identities: Vec<String>,
    },
}

fn config_from(c: &Common) -> Result<Config> {
    let file = match &c.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            Config::parse(&text)?
        }
        None => Config::default(),
    };
    let flags = Config {
        k: c.k,
        k1: c.k1,
        k2: c.k2,
        nu: c.nu,
        m: c.m,
        trunc: c.trunc,
        prec_bits: c.prec_bits,
        tol: c.tol,
        cache_dir: c.cache_dir.clone(),
        json: c.json.then_some(true),
    };
    let mut cfg = file.overlay(&flags);
    if cfg.cache_dir.is_none() {
        cfg.cache_dir = std::env::var_os(CACHE_ENV).map(PathBuf::from);
    }
    Ok(cfg)
}

fn context(cfg: &Config) -> Result<Context> {
    let cache = match &cfg.cache_dir {
        Some(d) => Cache::at(d)?,
        None => Cache::disabled(),
    };
    Ok(Context::new(cfg.prec_bits.unwrap_or(HARNESS_PREC), cache))
}

fn print_exact(label: &str, s: &ExactQSeries) {
    println!("{label}");
    for (n, c) in s.terms() {
        println!("  q^{n}: {c}");
    }
}

fn print_float(label: &str, s: &FloatQSeries) {
    println!("{label} (err <= {:.3e})", s.err());
    for (n, c) in s.terms() {
        let re = c.re.to_string_radix(10, Some(20));
        if c.im.is_zero() {
            println!("  q^{n}: {re}");
        } else {
            println!("  q^{n}: {re} + {}i", c.im.to_string_radix(10, Some(20)));
        }
    }
}

fn print_expansion(label: &str, e: &Expansion) {
    match e {
        Expansion::Exact(s) => print_exact(label, s),
        Expansion::Float(s) => print_float(label, s),
    }
}

fn record(e: &Expansion) -> SeriesRecord {
    match e {
        Expansion::Exact(s) => SeriesRecord::from(s),
        Expansion::Float(s) => SeriesRecord::from(s),
    }
}

fn need<T>(v: Option<T>, flag: &str) -> Result<T> {
    v.with_context(|| format!("--{flag} is required"))
}

fn execute(cmd: &Command, cfg: &Config) -> Result<bool> {
    let json = cfg.json.unwrap_or(false);
    let ctx = context(cfg)?;
    match cmd {
        Command::Basis { cusp } => {
            let k = need(cfg.k, "k")?;
            let kind = if *cusp { SpaceKind::Cuspidal } else { SpaceKind::Full };
            let b = miller_basis(k, kind, cfg.trunc.unwrap_or(10))?;
            if json {
                let v: Vec<_> = b.basis.iter().map(SeriesRecord::from).collect();
                println!("{}", serde_json::to_string_pretty(&json!({ "k": k, "basis": v }))?);
            } else {
                for (i, f) in b.basis.iter().enumerate() {
                    print_exact(&format!("basis[{i}]"), f);
                }
            }
        }
        Command::Eigenforms { norms } => {
            let k = need(cfg.k, "k")?;
            let data = ctx.eigen_data(k, cfg.trunc.unwrap_or(10), *norms)?;
            if json {
                let v: Vec<_> = data
                    .eigs
                    .iter()
                    .map(|e| {
                        json!({
                            "lambda2": e.lambda2.to_f64(),
                            "norm": e.norm.as_ref().map(|b| b.mid.to_f64()),
                            "series": SeriesRecord::from(&e.series),
                        })
                    })
                    .collect();
                println!("{}", serde_json::to_string_pretty(&json!({ "k": k, "eigenforms": v }))?);
            } else {
                for (i, e) in data.eigs.iter().enumerate() {
                    let norm = e.norm.as_ref().map(|b| format!(", <f,f> = {:.15e}", b.mid.to_f64()));
                    print_float(
                        &format!("f[{i}]: a(2) = {}{}", e.lambda2.to_f64(), norm.unwrap_or_default()),
                        &e.series,
                    );
                }
            }
        }
        Command::Bracket { cusp1, cusp2 } => {
            let (k1, k2) = (need(cfg.k1, "k1")?, need(cfg.k2, "k2")?);
            let nu = cfg.nu.unwrap_or(0);
            let trunc = cfg.trunc.unwrap_or(10);
            let form = |k: u32, cusp: bool| -> Result<ExactQSeries> {
                if cusp {
                    if dim_cusp(k) == 0 {
                        bail!("S_{k} is zero");
                    }
                    Ok(miller_basis(k, SpaceKind::Cuspidal, trunc)?.basis.remove(0))
                } else {
                    Ok(eisenstein(k, trunc)?)
                }
            };
            let b = rc_bracket(&form(k1, *cusp1)?, HalfInt::from(k1), &form(k2, *cusp2)?, HalfInt::from(k2), nu)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&SeriesRecord::from(&b))?);
            } else {
                print_exact(&format!("[F_{k1}, F_{k2}]_{nu}"), &b);
            }
        }
        Command::Shimura => {
            let lam = need(cfg.k, "k")?;
            let n = cfg.trunc.unwrap_or(10);
            let basis = rankin_cohen::halfint::plus_eigenbasis(lam, n * n, ctx.prec)?;
            let mut out = Vec::new();
            for (i, g) in basis.iter().enumerate() {
                let lift = shimura1(&g.g, n)?;
                if json {
                    out.push(json!({ "g": record(&g.g.series), "lift": record(&lift) }));
                } else {
                    print_expansion(&format!("g[{i}]"), &g.g.series.truncate(n));
                    print_expansion(&format!("S_1(g[{i}])"), &lift);
                }
            }
            if json {
                println!("{}", serde_json::to_string_pretty(&json!({ "lam": lam, "forms": out }))?);
            }
        }
        Command::Poincare { eigen } => {
            let (k, m) = (need(cfg.k, "k")?, cfg.m.unwrap_or(1));
            let n = cfg.trunc.unwrap_or(10);
            let p = if *eigen {
                let data = ctx.eigen_data(k, n.max(m).max(60), true)?;
                poincare_eigen(k, m, n, &data, ctx.prec)?
            } else {
                ctx.poincare(k, m, n)?
            };
            if json {
                let v = json!({ "k": k, "m": m, "method": p.method, "c_max": p.c_max, "series": SeriesRecord::from(&p.coeffs) });
                println!("{}", serde_json::to_string_pretty(&v)?);
            } else {
                print_float(&format!("P_{{{k},{m}}}"), &p.coeffs);
            }
        }
        Command::Norm { plus } => {
            let k = need(cfg.k, "k")?;
            let norms: Vec<_> = if *plus {
                ctx.plus_basis(k, ctx.series_cutoff)?.norms
            } else {
                let data = ctx.eigen_data(k, cfg.trunc.unwrap_or(60), true)?;
                data.eigs.into_iter().filter_map(|e| e.norm).collect()
            };
            if json {
                let v: Vec<_> = norms.iter().map(|b| json!({ "value": b.mid.to_f64(), "err": b.rad })).collect();
                println!("{}", serde_json::to_string_pretty(&json!({ "k": k, "plus": plus, "norms": v }))?);
            } else {
                for (i, b) in norms.iter().enumerate() {
                    println!("<g[{i}], g[{i}]> = {} +- {:.2e}", b.mid.to_string_radix(10, Some(20)), b.rad);
                }
            }
        }
        Command::Verify { identities } => {
            let ids: Vec<Identity> = if identities.iter().any(|s| s == "all") {
                Identity::ALL.to_vec()
            } else {
                identities.iter().map(|s| s.parse()).collect::<Result<_, _>>()?
            };
            let mut all = true;
            let mut reports = Vec::new();
            for id in ids {
                let r = run(&ctx, id, cfg)?;
                all &= r.passed();
                if json {
                    reports.push(r);
                } else {
                    println!("{}", r.summary());
                    for note in &r.notes {
                        println!("  note: {note}");
                    }
                }
            }
            if json {
                println!("{}", serde_json::to_string_pretty(&reports)?);
            }
            return Ok(all);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = config_from(&cli.common).and_then(|cfg| execute(&cli.command, &cfg));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
