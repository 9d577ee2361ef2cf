use thiserror::Error;

/// Errors raised anywhere in the engine.
///
/// The command-line front end maps each variant onto a stable exit code via
/// [`Error::exit_code`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("valuation {valuation} is smaller than the requested {requested}")]
    InsufficientValuation { valuation: String, requested: u32 },

    #[error("enumeration of {requested} items exceeds the budget of {cap}")]
    BudgetExceeded { requested: String, cap: u64 },

    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("uniformizer 'u' at position {position} is only allowed in characteristic p")]
    UniformizerInCharZero { position: usize },

    #[error("operation is undefined for the zero polynomial")]
    ZeroPolynomial,

    #[error("polynomial has non-unit content (valuation {valuation}); normalize first")]
    NonUnitContent { valuation: u32 },

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("dilatation depth exceeded the cap of {0}; the region probably meets a singular point")]
    DepthExceeded(u32),

    #[error("not semiquasihomogeneous: {0}")]
    NotSemiQuasiHomogeneous(String),

    #[error("invalid weight hint: {0}")]
    InvalidHint(String),

    #[error("stabilization not reached within {0} iterations")]
    StabilizationNotReached(u32),

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),
}

impl Error {
    /// Process exit code: 2 parse, 3 not-SQH, 4 depth, 5 stabilization,
    /// 6 budget, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Syntax { .. } | Error::UniformizerInCharZero { .. } => 2,
            Error::NotSemiQuasiHomogeneous(_) | Error::InvalidHint(_) => 3,
            Error::DepthExceeded(_) => 4,
            Error::StabilizationNotReached(_) => 5,
            Error::BudgetExceeded { .. } => 6,
            _ => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
