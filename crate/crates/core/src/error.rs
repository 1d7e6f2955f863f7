use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unknown constant `{0}` (expected one of pi, e, sqrt2, golden, gamma)")]
    UnknownConstant(String),

    #[error("malformed number `{0}`")]
    MalformedNumber(String),

    #[error("zero denominator")]
    ZeroDenominator,

    #[error("invalid continued fraction terms: {0}")]
    InvalidTerms(String),

    #[error("working precision must be at least 10 digits, got {0}")]
    PrecisionTooLow(u32),

    #[error("precision ceiling of {ceiling} digits exceeded ({context})")]
    PrecisionCeiling { ceiling: u32, context: String },

    #[error("moduli {0} and {1} are not coprime")]
    NonCoprimeModuli(u128, u128),

    #[error("coefficient {p} is not invertible modulo {q}")]
    NotInvertible { p: i128, q: u128 },

    #[error("factorization of {n} incomplete: composite cofactor {remainder} after {iterations} iterations")]
    FactorBudget {
        n: u128,
        remainder: u128,
        iterations: u64,
    },

    #[error("integer {0} does not fit the 128-bit modular arithmetic range")]
    Overflow(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    /// Budget or precision exhaustion rather than bad input.
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            Error::PrecisionCeiling { .. } | Error::FactorBudget { .. } | Error::Overflow(_)
        )
    }
}
