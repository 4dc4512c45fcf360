use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("level mismatch: {left} vs {right}")]
    LevelMismatch { left: u32, right: u32 },

    #[error("depth {requested} exceeds maximum {max}")]
    DepthExceeded { requested: u32, max: u32 },

    #[error("{what}: size {size} exceeds cap {cap}")]
    CapExceeded { what: &'static str, size: u128, cap: u128 },

    #[error("inadmissible word: {0}")]
    Inadmissible(String),

    #[error("polynomial mixes variable levels; refine it first")]
    MixedLevels,

    #[error("radical: {0}")]
    Radical(String),

    #[error("multiplier must be a nonzero integer")]
    ZeroMultiplier,

    #[error("exact backend only represents roots of unity of order dividing 8, got order {order}")]
    NonExactPhase { order: u32 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("incoherent measure family: {0}")]
    Incoherent(String),

    #[error("invalid argument: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
