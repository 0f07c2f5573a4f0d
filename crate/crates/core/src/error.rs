use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("coset scale {scale} is not a power of {p}")]
    ScaleNotPowerOfP { scale: String, p: u64 },

    #[error("incompatible coset spaces: {0}")]
    IncompatibleSpaces(String),

    #[error("matrix {0} has |det| < 2; the profinite tower would be trivial")]
    DegenerateMatrix(String),

    #[error("chain is not Cauchy at level {level}: {detail}")]
    NotCauchy { level: u32, detail: String },

    #[error("substitution rule parse error on line {line}: {detail}")]
    RuleParse { line: usize, detail: String },

    #[error("invalid substitution: {0}")]
    InvalidSubstitution(String),

    #[error("substitution is not primitive")]
    NotPrimitive,

    #[error("substitution is not of constant length")]
    NotConstantLength,

    #[error("illegal seed {left}|{right}: pair does not occur in any fifth-power image")]
    IllegalSeed { left: char, right: char },

    #[error("pair {pair:?} is not block-consistent: {detail}")]
    PairNotBlock { pair: String, detail: String },

    #[error("requested range [{lo}, {hi}] exceeds the generated patch [{patch_lo}, {patch_hi}]")]
    RangeExceedsPatch { lo: String, hi: String, patch_lo: String, patch_hi: String },

    #[error("patch would grow to {0} letters; lower the iteration count")]
    PatchTooLarge(usize),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("non-integer coordinate {point} after applying {map}")]
    NonIntegerPoint { point: String, map: String },

    #[error("overlapping union in recursion: point {0} produced twice")]
    Overlap(String),

    #[error("no candidate shift makes the window regular; supply a deeper candidate list")]
    ShiftExhausted,

    #[error("chair orientation data inconsistent: {0}")]
    ChairInconsistent(String),

    #[error("patch coordinates are not integral; autocorrelation keys need lattice points")]
    NonLatticePatch,

    #[error("unknown system {0:?}")]
    UnknownSystem(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
