use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero denominator")]
    ZeroDenominator,

    #[error("malformed word: {0}")]
    MalformedWord(String),

    #[error("operation needs a non-empty word")]
    EmptyWord,

    #[error("fold parameter z must be at least 1, got {0}")]
    InvalidZ(String),

    #[error("u_{n} does not divide alpha*u^3*v at step {n}; bad seed")]
    DivisibilityViolation { n: usize },

    #[error("term {n} would need about {predicted} decimal digits, budget is {budget}")]
    DigitBudgetExceeded { n: usize, predicted: u64, budget: u64 },

    #[error("x_{index} is not divisible by x_{prev}^2", prev = .index - 1)]
    StrongPropertyViolation { index: usize },

    #[error("closed-form z_{n} = {closed} disagrees with x_n/x_(n-1)^2 = {direct}")]
    ClosedFormMismatch { n: usize, closed: String, direct: String },

    #[error("could not certify the ceiling with {bits} bits of precision")]
    PrecisionExhausted { bits: u32 },

    #[error("certified ceiling {certified} disagrees with exact evaluation {exact}")]
    CertificationMismatch { certified: String, exact: String },

    #[error("folded expansion at n = {n} does not match the exact partial sum")]
    OracleMismatch { n: usize },

    #[error("length formula does not apply: {0}")]
    CaseOutOfRange(String),

    #[error("unknown example `{0}`")]
    UnknownExample(String),

    #[error("invalid series spec: {0}")]
    InvalidSpec(String),

    #[error("parse error: {0}")]
    Parse(String),
}
