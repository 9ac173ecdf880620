use thiserror::Error;

use crate::domain::Amount;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Everything that can go wrong in the library. The CLI maps these onto exit
/// codes, see [`Error::exit_code`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unbalanced: inputs sum to {inputs}, outputs sum to {outputs}")]
    Unbalanced { inputs: u128, outputs: u128 },

    #[error("non-positive value at {side} index {index}")]
    NonPositiveValue { side: &'static str, index: usize },

    #[error("empty {0}")]
    Empty(&'static str),

    #[error("dimension mismatch: expected {expected_rows}x{expected_cols}, got {rows}x{cols}")]
    DimensionMismatch {
        expected_rows: usize,
        expected_cols: usize,
        rows: usize,
        cols: usize,
    },

    #[error("infeasible: total {total} is below target {target}")]
    Infeasible { total: u128, target: u64 },

    #[error("instance too large: {size} exceeds limit {limit}")]
    TooLarge { size: usize, limit: usize },

    #[error("odd total {0}: no equal split possible")]
    OddSum(u128),

    #[error("monotonicity violation: {func} at l={at}")]
    MonotonicityViolation { func: &'static str, at: u32 },

    #[error("non-positive reward at l={0}")]
    NonPositiveReward(u32),

    #[error("negative {func} at l={at}")]
    NegativeValue { func: &'static str, at: u32 },

    #[error("length {l} outside tabulated domain [1, {max}]")]
    OutOfDomain { l: u32, max: u32 },

    #[error("invalid length distribution: {0}")]
    InvalidPmf(String),

    #[error("sybil id {0} collides with a route or sybil id")]
    SybilCollision(u64),

    #[error("invalid route: {0}")]
    InvalidRoute(String),

    #[error("invalid attack: {0}")]
    InvalidAttack(String),

    #[error("base case fails at l={l} ({kind}): lhs {lhs}, rhs {rhs}")]
    BaseCaseFails {
        kind: &'static str,
        l: u32,
        lhs: Box<Amount>,
        rhs: Box<Amount>,
    },

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("cannot parse rational {0:?}")]
    ParseAmount(String),
}

impl Error {
    /// 1 = semantic negative, 2 = malformed input, 3 = solver limits.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::OddSum(_) => 1,
            Error::Infeasible { .. } | Error::TooLarge { .. } => 3,
            _ => 2,
        }
    }
}
