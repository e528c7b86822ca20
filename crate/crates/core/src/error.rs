use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("family parameter a = {0} is out of range (requires a >= {1})")]
    ParamOutOfRange(i64, i64),

    #[error("operands belong to different families (a = {0} vs a = {1})")]
    ParamMismatch(u32, u32),

    #[error("root refinement reached error {achieved:e}, target was {target:e}")]
    Precision { achieved: f64, target: f64 },

    #[error("digit {digit} at index {index} is outside [0, {max}]")]
    DigitOutOfRange { index: i64, digit: u32, max: u32 },

    #[error("value {0} is outside the accepted interval")]
    ValueOutOfRange(f64),

    #[error("(a, b) = ({0}, {1}) is outside the ranges of the d(1, beta) classifier")]
    ClassifierRange(i64, i64),

    #[error("sequence is not admissible")]
    NotAdmissible,

    #[error("sequence has an empty period")]
    NotPeriodic,

    #[error("automaton closure exceeded {0} states")]
    StateCap(usize),

    #[error("map index {index} is outside [0, {max}]")]
    MapIndex { index: u32, max: u32 },

    #[error("code violates the follow constraint at position {0}")]
    FollowConstraint(usize),

    #[error("exact identity failed: {0}")]
    IdentityFailure(&'static str),

    #[error("expansion breaks the digit rules at position {0}")]
    InvalidExpansion(usize),

    #[error("point ({0}, {1}) is not on the boundary of the unit square")]
    NotOnSquare(f64, f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
