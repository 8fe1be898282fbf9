use thiserror::Error;

/// Errors raised by the arithmetic, group and verification layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("{0} is not a supported prime (expected a prime in 2..=13)")]
    NotPrime(u32),

    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u32, u32),

    /// The caller must rerun at a higher precision.
    #[error("precision exceeded: coefficient of t^{index} requested, series known modulo t^{abs_prec}")]
    PrecisionExceeded { index: i64, abs_prec: i64 },

    #[error("valuation indeterminate: value is zero modulo t^{0}")]
    IndeterminateValuation(i64),

    #[error("division by zero")]
    DivisionByZero,

    #[error("matrix is {rows}x{cols}, expected square")]
    NonSquare { rows: usize, cols: usize },

    #[error("matrix is not invertible")]
    Singular,

    #[error("element is not upper triangular")]
    NotBorel,

    #[error("valuation {found} does not match level n = {expected}")]
    LevelMismatch { expected: i64, found: i64 },

    #[error("unknown claim id `{0}`")]
    UnknownClaim(String),

    #[error("enumeration of {requested} group operations exceeds the guard of {bound}")]
    GuardExceeded { requested: u128, bound: u128 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
