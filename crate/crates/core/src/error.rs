use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is singular")]
    Singular,

    #[error("zero vector has no projective class")]
    ZeroVector,

    #[error("matrix is not proximal (top modulus {top}, second modulus {second})")]
    NotProximal { top: f64, second: f64 },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("word budget exceeded: {needed} words requested, budget {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("bad modulus {modulus}: {reason}")]
    BadModulus { modulus: u64, reason: String },

    #[error("search failed after {examined} candidates")]
    SearchFailed { examined: u64 },

    #[error("limit set approximation is empty")]
    EmptyApprox,

    #[error("insufficient scales: {usable} usable, need at least 3")]
    InsufficientScales { usable: usize },

    #[error("shell [c^{t}, c^{t_next}) contains no points", t_next = .t + 1)]
    EmptyShell { t: i32 },

    #[error("precision exceeded: max_len {requested} exceeds the cap {cap}")]
    PrecisionExceeded { requested: usize, cap: usize },

    #[error("no orbit point entered the ball of radius {radius} around 0")]
    NoApproach { radius: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    /// Short variant name, used by the CLI when reporting failures.
    pub fn name(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::Singular => "Singular",
            Error::ZeroVector => "ZeroVector",
            Error::NotProximal { .. } => "NotProximal",
            Error::NumericalFailure(_) => "NumericalFailure",
            Error::BudgetExceeded { .. } => "BudgetExceeded",
            Error::BadModulus { .. } => "BadModulus",
            Error::SearchFailed { .. } => "SearchFailed",
            Error::EmptyApprox => "EmptyApprox",
            Error::InsufficientScales { .. } => "InsufficientScales",
            Error::EmptyShell { .. } => "EmptyShell",
            Error::PrecisionExceeded { .. } => "PrecisionExceeded",
            Error::NoApproach { .. } => "NoApproach",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::Precondition(_) => "Precondition",
            Error::Parse { .. } => "ParseError",
        }
    }
}
