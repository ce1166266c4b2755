use thiserror::Error;

use crate::clopen::Word;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("letter {letter} out of range for alphabet of size {arity}")]
    LetterOutOfRange { letter: u8, arity: u8 },
    #[error("alphabet mismatch: {left} vs {right}")]
    AlphabetMismatch { left: u8, right: u8 },
    #[error("alphabet size must be at least 2, got {0}")]
    BadArity(u8),

    #[error("section closure exceeded node budget of {budget}")]
    TailBudgetExceeded { budget: usize },
    #[error("invalid machine definition: {0}")]
    InvalidMachine(String),
    #[error("invalid depth permutation: {0}")]
    InvalidDepthPerm(String),
    #[error("unknown tail state `{0}`")]
    UnknownState(String),

    #[error("domain words {0} and {1} are comparable")]
    ComparableDomains(Word, Word),
    #[error("range words {0} and {1} are comparable")]
    ComparableRanges(Word, Word),
    #[error("elements {0} and {1} are not compatible")]
    IncompatiblePair(usize, usize),
    #[error("element is not a unit")]
    NotAUnit,

    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("incompatible join at path {0:?}")]
    IncompatibleJoin(Vec<usize>),

    #[error("transporter {0} does not have the base idempotent as domain")]
    DomainMismatch(usize),
    #[error("multisection idempotents overlap or are empty")]
    OverlappingIdempotents,
    #[error("restriction to an empty or non-contained clopen")]
    EmptyRestriction,
    #[error("subdivision is not a partition of the base idempotent")]
    BadSubdivision,
    #[error("supports intersect outside the designated idempotents")]
    SupportsOverlapElsewhere,
    #[error("supports do not intersect")]
    EmptyIntersection,
    #[error("permutation is not even")]
    NotInAlt,
    #[error("invalid permutation of degree {0}")]
    BadPermutation(usize),
    #[error("no auxiliary elements for kit section from part {part} (T element #{element})")]
    KitConstructionFailed { element: usize, part: usize },

    #[error("input must not be the identity")]
    IdentityInput,
    #[error("empty input clopen")]
    EmptyInput,
    #[error("unit does not stabilize part {0}")]
    NotPartwiseStabilizing(usize),
    #[error("not a partition")]
    NotAPartition,

    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error("unknown family `{0}`")]
    UnknownFamily(String),

    #[error("syntax error at {line}:{col}: expected {expected}")]
    Syntax { line: usize, col: usize, expected: String },
}

pub type Result<T> = std::result::Result<T, Error>;
