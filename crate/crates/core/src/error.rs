use num_bigint::BigUint;
use thiserror::Error;

/// Errors produced by distribution construction, rank enumeration, cost
/// evaluation and the simulators.
#[derive(Error, Debug)]
pub enum Error {
    #[error("parameter `{name}` = {value} violates `{constraint}`")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    #[error("alpha = {0} is outside (0, 1) ∪ (1, ∞); use shannon_entropy for alpha = 1")]
    InvalidAlpha(f64),

    #[error("distribution is invalid: {0}")]
    InvalidDistribution(String),

    #[error("type-class count {classes} exceeds the memory budget of {budget} classes")]
    ClassBudgetExceeded { classes: BigUint, budget: u64 },

    #[error("rank {rank} is outside [1, {key_count}]")]
    RankOutOfRange { rank: BigUint, key_count: BigUint },

    #[error("count {count} is outside [0, {key_count}]")]
    CountOutOfRange { count: BigUint, key_count: BigUint },

    #[error("symbol {0} is not in the support")]
    SymbolNotInSupport(i64),

    #[error("key has length {got}, expected {expected}")]
    KeyLengthMismatch { got: usize, expected: usize },

    #[error("instance with {size} keys exceeds the limit of {limit}")]
    InstanceTooLarge { size: BigUint, limit: u64 },

    #[error("rho = {0} is unsupported here; only 1 and 1/2 have typed evaluation")]
    UnsupportedRho(f64),

    #[error("degenerate single-key distribution: H_2/3 = 0")]
    DegenerateDistribution,

    #[error("no success after {0} doublings; the target fraction is unreachable within the cap")]
    MaxDoublingsExceeded(u32),

    #[error("unknown verification suite `{0}`")]
    UnknownSuite(String),

    #[error("malformed distribution JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("cache file is not usable: {0}")]
    CacheFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
