use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("h = {h} and k = {k} are not coprime")]
    NotCoprime { h: i64, k: u64 },

    #[error("k must be positive")]
    ZeroModulus,

    #[error("requested range [{lo}, {hi}] exceeds cached length {len}")]
    RangeOverflow { lo: f64, hi: f64, len: u64 },

    #[error("N_max = {requested} exceeds the configured cap {cap}")]
    CapExceeded { requested: u64, cap: u64 },

    #[error("residue reconstruction width insufficient: need {needed_bits} bits, have {available_bits}")]
    ReconstructionWidth {
        needed_bits: u64,
        available_bits: u64,
    },

    #[error("unknown form id `{0}` (expected delta, delta_e4 or delta_e6)")]
    UnknownForm(String),

    #[error("exponent-pair word contains invalid character `{0}` (only A and B allowed)")]
    BadProcessWord(char),

    #[error("pair <{p}, {q}> violates 0 <= p <= 1/2 <= q <= 1")]
    InvalidPair { p: String, q: String },

    #[error("exponent pair has p = 0; the second large-values term 2q/p is undefined")]
    ZeroP,

    #[error("{0}")]
    InvalidParameter(String),

    #[error("iteration budget exceeded: {0} box iterations requested, limit {1}")]
    IterationBudget(u128, u128),
}

pub type Result<T> = std::result::Result<T, Error>;
