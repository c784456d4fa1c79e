use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("exponent lattice width mismatch: 1/{left} vs 1/{right}")]
    WidthMismatch { left: u32, right: u32 },

    #[error("coefficient index {index} lies beyond the reliable truncation {trunc}")]
    OutOfRange { index: u64, trunc: u64 },

    #[error("{context}: needs input known to exponent {needed}, have {available}")]
    InsufficientTruncation {
        context: &'static str,
        needed: u64,
        available: u64,
    },

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("sqrt(pi) exponent {0} does not cancel in a Gamma ratio")]
    SqrtPiMismatch(i32),

    #[error("plus condition violated at coefficient index {index}")]
    PlusConditionViolated { index: u64 },

    #[error("rank deficiency: found rank {rank}, expected {expected}")]
    RankDeficient { rank: usize, expected: usize },

    #[error("unresolved eigenvalue degeneracy in weight {weight}: {detail}")]
    Degenerate { weight: u32, detail: String },

    #[error("leading lift coefficient c(1) vanishes for eigenform {index}")]
    VanishingLift { index: usize },

    #[error("tail bound {bound:e} exceeds tolerance {tol:e} ({context})")]
    TailBound {
        context: String,
        bound: f64,
        tol: f64,
    },

    #[error("precision not reachable: {0}")]
    Precision(String),

    #[error("Petersson norms have not been attached to the eigenforms of weight {0}")]
    MissingNorms(u32),

    #[error("imaginary part {imag:e} of a norm exceeds its error {err:e}")]
    ComplexNorm { imag: f64, err: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
