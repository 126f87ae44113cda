use thiserror::Error;

/// Errors raised by the construction, search and verification routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("not a metric: {0}")]
    NotAMetric(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("operation requires enumerating all points, but this oracle has no enumerator")]
    EnumerationUnavailable,

    #[error("budget exceeded: {required} units of work required, budget is {budget}")]
    BudgetExceeded { required: String, budget: u64 },

    #[error("exponent {name} = {value} is outside its admissible range {range}")]
    InvalidExponent {
        name: &'static str,
        value: String,
        range: &'static str,
    },

    #[error("residue {residue} is out of range for a cycle of {units} units")]
    ResidueOutOfRange { residue: u64, units: u64 },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("invalid cycle: {0}")]
    InvalidCycle(String),

    #[error("invalid pair class: {0}")]
    InvalidPairClass(String),

    #[error("simplex support {support} must be even")]
    OddSupport { support: usize },

    #[error("simplex size {size} must be even and at least 2")]
    InvalidSimplexSize { size: usize },

    #[error("insufficient coordinates: layout needs {needed}, space has {available}")]
    InsufficientCoordinates { needed: usize, available: usize },

    #[error("edge distance 2*delta = {edge} quanta exceeds half the cycle ({half} quanta)")]
    DeltaTooLarge { edge: u64, half: u64 },

    #[error("{which} pair is not a member of the requested class")]
    NotInClass { which: &'static str },

    #[error("class chain leaves the valid range at level {level}: {reason}")]
    Chain { level: usize, reason: String },

    #[error("declared target roundness {declared} is below the exponent p = {p}")]
    RoundnessPremise { declared: f64, p: f64 },

    #[error("space has too few points: {0}")]
    TooFewPoints(String),

    #[error("ball {ball} cannot host {needed} distinct points")]
    Capacity { ball: usize, needed: usize },

    #[error("ball diameters must be non-increasing (violated at index {index})")]
    NonMonotoneDiameters { index: usize },

    #[error("probe precondition failed: {0}")]
    ProbePrecondition(String),

    #[error("word distance exceeds cutoff {cutoff} (lower bound {lower_bound})")]
    CutoffExceeded { cutoff: u64, lower_bound: u64 },

    #[error("block M_{block} is too large to materialise points")]
    BlockTooLarge { block: u32 },

    #[error("invalid block index {0}: blocks are even integers >= 2")]
    InvalidBlock(u32),

    #[error("numeric precision exhausted: {0}")]
    Precision(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
