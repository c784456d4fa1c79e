use serde::{Deserialize, Serialize};

use super::cache::{float_from_record, float_record, BallRecord, Cache};
use crate::complex::BigComplex;
use crate::error::Result;
use crate::halfint::{plus_eigenbasis, PlusEigenform, PlusForm};
use crate::level1::{eigenforms, EigenData, Eigenform};
use crate::numerics::Ball;
use crate::petersson::{inner_level1_with, inner_plus_with, PlusOptions, QuadOptions};
use crate::poincare::{poincare_kloosterman_with, KloostermanOptions, PoincareMethod, PoincareSeries};
use crate::qseries::{Expansion, SeriesRecord};

/// Shared settings and the cache for the verifiers.
#[derive(Clone, Debug)]
pub struct Context {
    pub prec: u32,
    pub cache: Cache,
    pub quad: QuadOptions,
    pub kloosterman: KloostermanOptions,
    /// Coefficients kept for series summed to infinity: plus-space forms in
    /// the theta-pairing sums and the `n`-sums of the bracket identity.
    pub series_cutoff: u64,
}

/// The plus eigenbasis of one weight together with its Petersson norms.
#[derive(Clone, Debug)]
pub struct PlusBasis {
    pub lam: u32,
    pub forms: Vec<PlusEigenform>,
    pub norms: Vec<Ball>,
}

impl Context {
    pub fn new(prec: u32, cache: Cache) -> Self {
        Self {
            prec,
            cache,
            quad: QuadOptions::default(),
            kloosterman: KloostermanOptions::default(),
            series_cutoff: 600,
        }
    }

    fn quad_key(&self) -> String {
        let q = &self.quad;
        format!("nx={},ny={},y={},cap={:?}", q.nx, q.ny, q.y_split, q.max_terms)
    }

    /// Eigenforms of `S_k` to `q^trunc`, optionally with their norms.
    pub fn eigen_data(&self, k: u32, trunc: u64, with_norms: bool) -> Result<EigenData> {
        let key = format!(
            "eigen/k={k}/trunc={trunc}/prec={}/norms={with_norms}/{}",
            self.prec,
            self.quad_key()
        );
        if let Some(r) = self.cache.get::<EigenRecord>(&key)? {
            return r.to_data();
        }
        let mut data = eigenforms(k, trunc, self.prec)?;
        if with_norms {
            let norms = data
                .eigs
                .iter()
                .map(|e| inner_level1_with(&e.series, &e.series, k, self.prec, &self.quad)?.as_norm())
                .collect::<Result<Vec<_>>>()?;
            data.set_norms(norms)?;
        }
        self.cache.put(&key, &EigenRecord::from(&data))?;
        Ok(data)
    }

    pub fn plus_basis(&self, lam: u32, trunc: u64) -> Result<PlusBasis> {
        let key = format!("plus/lam={lam}/trunc={trunc}/prec={}/{}", self.prec, self.quad_key());
        if let Some(r) = self.cache.get::<PlusRecord>(&key)? {
            return r.to_basis();
        }
        let forms = plus_eigenbasis(lam, trunc, self.prec)?;
        let norms = self.plus_norms(&forms.iter().map(|f| f.g.clone()).collect::<Vec<_>>())?;
        let basis = PlusBasis { lam, forms, norms };
        self.cache.put(&key, &PlusRecord::from(&basis))?;
        Ok(basis)
    }

    pub fn plus_norms(&self, forms: &[PlusForm]) -> Result<Vec<Ball>> {
        let opts = PlusOptions {
            quad: self.quad,
            ..Default::default()
        };
        forms
            .iter()
            .map(|g| inner_plus_with(g, g, self.prec, &opts)?.as_norm())
            .collect()
    }

    /// `P_{k,m}` to `q^n` by the Kloosterman-Bessel formula.
    pub fn poincare(&self, k: u32, m: u64, n: u64) -> Result<PoincareSeries> {
        self.poincare_with(k, m, n, &self.kloosterman)
    }

    pub fn poincare_with(&self, k: u32, m: u64, n: u64, o: &KloostermanOptions) -> Result<PoincareSeries> {
        let key = format!(
            "poincare/k={k}/m={m}/n={n}/prec={}/c={},tol={:e},d={}",
            self.prec, o.c_max, o.tol, o.max_doublings
        );
        if let Some(r) = self.cache.get::<PoincareRecord>(&key)? {
            return r.to_series();
        }
        let p = poincare_kloosterman_with(k, m, n, self.prec, o)?;
        self.cache.put(&key, &PoincareRecord::from(&p))?;
        Ok(p)
    }
}

#[derive(Serialize, Deserialize)]
struct EigenformRecord {
    series: SeriesRecord,
    exact: Option<SeriesRecord>,
    lambda2: (u32, String),
    lambda3: (u32, String),
    norm: Option<BallRecord>,
}

#[derive(Serialize, Deserialize)]
struct EigenRecord {
    k: u32,
    eigs: Vec<EigenformRecord>,
}

impl From<&EigenData> for EigenRecord {
    fn from(d: &EigenData) -> Self {
        Self {
            k: d.k,
            eigs: d
                .eigs
                .iter()
                .map(|e| EigenformRecord {
                    series: SeriesRecord::from(&e.series),
                    exact: e.exact.as_ref().map(SeriesRecord::from),
                    lambda2: float_record(&e.lambda2),
                    lambda3: float_record(&e.lambda3),
                    norm: e.norm.as_ref().map(BallRecord::from),
                })
                .collect(),
        }
    }
}

impl EigenRecord {
    fn to_data(&self) -> Result<EigenData> {
        let eigs = self
            .eigs
            .iter()
            .map(|r| {
                Ok(Eigenform {
                    series: r.series.to_float()?,
                    exact: r.exact.as_ref().map(|s| s.to_exact()).transpose()?,
                    lambda2: float_from_record(&r.lambda2)?,
                    lambda3: float_from_record(&r.lambda3)?,
                    norm: r.norm.as_ref().map(|b| b.to_ball()).transpose()?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(EigenData { k: self.k, eigs })
    }
}

#[derive(Serialize, Deserialize)]
struct PlusFormRecord {
    series: SeriesRecord,
    provenance: String,
    c1: ((u32, String), (u32, String)),
    lift_residual: f64,
    lambda2: (u32, String),
}

#[derive(Serialize, Deserialize)]
struct PlusRecord {
    lam: u32,
    forms: Vec<PlusFormRecord>,
    norms: Vec<BallRecord>,
}

impl From<&PlusBasis> for PlusRecord {
    fn from(b: &PlusBasis) -> Self {
        Self {
            lam: b.lam,
            forms: b
                .forms
                .iter()
                .map(|f| PlusFormRecord {
                    series: match &f.g.series {
                        Expansion::Exact(s) => SeriesRecord::from(s),
                        Expansion::Float(s) => SeriesRecord::from(s),
                    },
                    provenance: f.g.provenance.clone(),
                    c1: (float_record(&f.c1.re), float_record(&f.c1.im)),
                    lift_residual: f.lift_residual,
                    lambda2: float_record(&f.lambda2),
                })
                .collect(),
            norms: b.norms.iter().map(BallRecord::from).collect(),
        }
    }
}

impl PlusRecord {
    fn to_basis(&self) -> Result<PlusBasis> {
        let forms = self
            .forms
            .iter()
            .map(|r| {
                let series = match &r.series {
                    SeriesRecord::Exact { .. } => Expansion::Exact(r.series.to_exact()?),
                    SeriesRecord::Float { .. } => Expansion::Float(r.series.to_float()?),
                };
                Ok(PlusEigenform {
                    g: PlusForm::new(self.lam, series, r.provenance.clone())?,
                    c1: BigComplex::from_parts(float_from_record(&r.c1.0)?, float_from_record(&r.c1.1)?),
                    lift_residual: r.lift_residual,
                    lambda2: float_from_record(&r.lambda2)?,
                })
            })
            .collect::<Result<_>>()?;
        let norms = self.norms.iter().map(|b| b.to_ball()).collect::<Result<_>>()?;
        Ok(PlusBasis {
            lam: self.lam,
            forms,
            norms,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct PoincareRecord {
    k: u32,
    m: u64,
    coeffs: SeriesRecord,
    method: PoincareMethod,
    c_max: Option<u64>,
}

impl From<&PoincareSeries> for PoincareRecord {
    fn from(p: &PoincareSeries) -> Self {
        Self {
            k: p.k,
            m: p.m,
            coeffs: SeriesRecord::from(&p.coeffs),
            method: p.method,
            c_max: p.c_max,
        }
    }
}

impl PoincareRecord {
    fn to_series(&self) -> Result<PoincareSeries> {
        Ok(PoincareSeries {
            k: self.k,
            m: self.m,
            coeffs: self.coeffs.to_float()?,
            method: self.method,
            c_max: self.c_max,
        })
    }
}
