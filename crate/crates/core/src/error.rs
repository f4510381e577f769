use thiserror::Error;

/// Errors shared by every module in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("input must be at least 2, got {0}")]
    InputTooSmall(String),

    #[error("factorization limit exceeded: cofactor {cofactor} is composite and above the trial-division bound {bound}")]
    FactorizationLimitExceeded { cofactor: String, bound: u64 },

    #[error("{a} is not invertible modulo {n}")]
    NotInvertible { a: String, n: String },

    #[error("moduli are not pairwise coprime")]
    ModuliNotCoprime,

    #[error("index {index} is out of range 1..={r}")]
    IndexOutOfRange { index: usize, r: usize },

    #[error("operands belong to different moduli ({left} vs {right})")]
    MixedModuli { left: String, right: String },

    #[error("bad parameters: {0}")]
    BadParams(String),

    #[error("level {k} is out of range 0..={r}")]
    LevelOutOfRange { k: usize, r: usize },

    #[error("T is not a subset of S")]
    NotNested,

    #[error("enumeration cap exceeded: {what} ({value} > {cap})")]
    CapExceeded {
        what: &'static str,
        value: String,
        cap: u64,
    },

    #[error("{b} is not a unit modulo {m}")]
    NotAUnit { b: String, m: String },

    #[error("{b} is not a cycle element modulo {m}")]
    NotCycleElement { b: String, m: String },

    #[error("exponent {e} is below the required minimum {min}")]
    ExponentTooSmall { e: String, min: u32 },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
