use core::fmt;

/// Errors produced by the construction, verification and coding routines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// The weight list was empty.
    Empty,
    /// A weight of zero was supplied at the given input position.
    ZeroWeight { index: usize },
    /// A codeword length of zero was supplied at the given position.
    ZeroLength { index: usize },
    /// The list was declared sorted but is not non-decreasing at `index`.
    NotSorted { index: usize },
    /// Two parallel lists disagree on their length.
    LengthMismatch { expected: usize, found: usize },
    /// A rank or count argument fell outside `1..=len`.
    OutOfRange { value: usize, len: usize },
    /// An exact accumulator overflowed.
    Overflow,
    /// Two leaf-bearing levels are too far apart to express the group size.
    LevelGap { gap: u32 },
    /// A level assignment that no full binary tree can realize.
    InvalidAssignment(&'static str),
    /// The input is too large for the exhaustive enumerator.
    TooLarge { n: usize, max: usize },
    /// The lengths violate the Kraft inequality, so no prefix code exists.
    KraftExceeded,
    /// A symbol outside the code table.
    UnknownSymbol { symbol: usize },
    /// The bit stream ended inside a codeword.
    Truncated,
    /// A bit pattern that does not belong to any codeword.
    InvalidCode,
    /// A codeword longer than the table supports.
    LengthTooLong { length: u32, max: u32 },
    /// A byte container that does not follow the expected layout.
    Malformed(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Empty => write!(f, "empty weight list"),
            Error::ZeroWeight { index } => write!(f, "weight at index {index} is zero"),
            Error::ZeroLength { index } => write!(f, "codeword length at index {index} is zero"),
            Error::NotSorted { index } => {
                write!(f, "weights declared sorted but decrease at index {index}")
            }
            Error::LengthMismatch { expected, found } => {
                write!(f, "length mismatch: expected {expected} entries, found {found}")
            }
            Error::OutOfRange { value, len } => {
                write!(f, "rank {value} out of range for {len} elements")
            }
            Error::Overflow => write!(f, "arithmetic overflow"),
            Error::LevelGap { gap } => write!(f, "level gap {gap} too large"),
            Error::InvalidAssignment(why) => write!(f, "invalid level assignment: {why}"),
            Error::TooLarge { n, max } => write!(f, "{n} weights exceed the limit of {max}"),
            Error::KraftExceeded => write!(f, "Kraft sum exceeds one"),
            Error::UnknownSymbol { symbol } => write!(f, "symbol {symbol} not in code table"),
            Error::Truncated => write!(f, "bit stream truncated inside a codeword"),
            Error::InvalidCode => write!(f, "bit pattern matches no codeword"),
            Error::LengthTooLong { length, max } => {
                write!(f, "codeword length {length} exceeds the supported {max}")
            }
            Error::Malformed(why) => write!(f, "malformed container: {why}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T, E = Error> = core::result::Result<T, E>;
