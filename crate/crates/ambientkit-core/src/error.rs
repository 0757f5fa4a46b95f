//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Everything that can go wrong when driving the exact pipelines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A composition was offered to an index set of a different degree or slot count.
    #[error("composition {parts:?} is not in the index set of degree {degree} on {slots} slots")]
    NotInIndexSet {
        parts: Vec<u32>,
        degree: i64,
        slots: usize,
    },

    /// An ordinal fell outside an index set.
    #[error("ordinal {ordinal} out of range for an index set of cardinality {cardinality}")]
    OrdinalOutOfRange { ordinal: usize, cardinality: usize },

    /// Multinomial weight requested at the wrong degree.
    #[error("degree mismatch: composition has degree {found}, expected {expected}")]
    DegreeMismatch { expected: u32, found: u32 },

    /// Slot index outside `1..=slots`.
    #[error("slot {slot} out of range 1..={slots}")]
    SlotOutOfRange { slot: usize, slots: usize },

    /// Matrix shapes incompatible with the requested operation.
    #[error("shape mismatch: {context} ({left_rows}x{left_cols} vs {right_rows}x{right_cols})")]
    ShapeMismatch {
        context: &'static str,
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },

    /// A shift variant that the family does not carry.
    #[error("shift variant {variant} is unavailable for family {family}")]
    VariantUnavailable {
        family: &'static str,
        variant: &'static str,
    },

    /// A differential level outside the family's chain complex.
    #[error("differential level {level} is unavailable for family {family}")]
    LevelUnavailable { family: &'static str, level: u8 },

    /// A weight assignment at which a shift coefficient vanishes, so the
    /// requested right inverse does not exist.
    #[error("degenerate weight: coefficient of {variant} vanishes at {alpha:?}")]
    DegenerateWeight {
        variant: &'static str,
        alpha: Vec<u32>,
    },

    /// A coefficient family indexed by the wrong index set.
    #[error("index mismatch: {0}")]
    IndexMismatch(String),

    /// A stated precondition of an operation does not hold.
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    /// A nowhere-zero function hypothesis failed.
    #[error("zero denominator: {0}")]
    ZeroDenominator(String),

    /// The symbolic oracle requires homogeneous inputs.
    #[error("input in slot {slot} is not homogeneous")]
    NonHomogeneousInput { slot: usize },

    /// Flat space carries no nonconstant scalar invariants, so the oracle
    /// only evaluates families with zero invariant weight.
    #[error("invariant weights must be zero in the flat model (got l1={l1}, l2={l2})")]
    InvariantModeUnsupported { l1: u32, l2: u32 },

    /// Operator parameters that violate the construction hypotheses.
    #[error("invalid operator spec: {0}")]
    InvalidSpec(String),

    /// Unparseable rational, weight list, or serialized document.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
