use thiserror::Error;

use crate::recursive::IngredientRequest;

pub type Result<T, E = NestError> = std::result::Result<T, E>;

/// Every failure the library can report.
///
/// Verification failures are *not* errors: they come back as failing
/// checks on a [`Certificate`](crate::verify::Certificate).
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NestError {
    #[error("residue {residue} out of range for modulus {modulus}")]
    ResidueOutOfRange { residue: usize, modulus: usize },

    #[error("label `{0}` is not a declared fixed point")]
    UndeclaredFixedLabel(String),

    #[error("base block {base} declares an orbit of length {length} that does not close")]
    ShortOrbitNotClosed { base: usize, length: usize },

    #[error("malformed base block {base}: {reason}")]
    MalformedBase { base: usize, reason: String },

    #[error("nested point lies inside blocks {0:?}")]
    NestedPointInsideBlock(Vec<usize>),

    #[error("no design with parameters ({v},{k},{lambda}): r or b is not integral")]
    InfeasibleParams { v: usize, k: usize, lambda: usize },

    #[error("v = {v} is below the smallest supported order {min}")]
    VTooSmall { v: usize, min: usize },

    #[error("no cyclic STS({0}) exists")]
    NoCyclicSts(usize),

    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),

    #[error("missing ingredient: {0}")]
    MissingIngredient(IngredientRequest),

    #[error("unsupported case: {0}")]
    UnsupportedCase(String),

    #[error("illegal reuse of point {point}: pair {{{}, {}}} already saturated", pair.0, pair.1)]
    IllegalReuse {
        point: String,
        pair: (String, String),
    },

    #[error("nesting is not strong: {0}")]
    NotStrong(String),

    #[error("colouring is not harmonious: {0}")]
    NotHarmonious(String),

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("malformed file: {0}")]
    Malformed(String),
}

impl NestError {
    /// Process exit status for the command-line driver.
    ///
    /// `0` pass, `1` verification failure, `2` unsupported or missing
    /// ingredient, `3` malformed input.
    pub fn exit_code(&self) -> i32 {
        match self {
            NestError::UnsupportedCase(_) | NestError::MissingIngredient(_) => 2,
            NestError::Malformed(_) => 3,
            _ => 1,
        }
    }
}
