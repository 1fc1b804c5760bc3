use thiserror::Error;

/// Errors produced by the model, counting and dynamics layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ErgmError {
    #[error("vertex count must be at least {min}, got {got}")]
    TooFewVertices { min: usize, got: usize },

    #[error("vertex {vertex} out of range 1..={n}")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("self-loop ({0}, {0}) is not a valid edge")]
    SelfLoop(usize),

    #[error("edge index {index} out of range for {pairs} vertex pairs")]
    EdgeIndexOutOfRange { index: usize, pairs: usize },

    #[error("graphs have different vertex counts ({left} vs {right})")]
    MismatchedSize { left: usize, right: usize },

    #[error("pattern `{pattern}` has {pattern_vertices} vertices but the host graph only has {n}")]
    PatternTooLarge {
        pattern: String,
        pattern_vertices: usize,
        n: usize,
    },

    #[error("invalid pattern: {0}")]
    InvalidPattern(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("the two edges of a pair count must differ")]
    IdenticalEdges,

    #[error("r-statistic needs a pattern with at least two edges; `{0}` has fewer")]
    RStatisticUndefined(String),

    #[error("empty pattern list")]
    EmptyPatternList,

    #[error("probability argument {0} is outside [0, 1]")]
    ProbabilityOutOfRange(f64),

    #[error("exact enumeration refused: n = {n} exceeds the limit of {limit}")]
    ExactTooLarge { n: usize, limit: usize },

    #[error("enumeration guard exceeded: {work} tuples > {limit}")]
    GuardExceeded { work: u128, limit: u128 },

    #[error("monotone coupling order violated at step {step} (edge index {edge})")]
    OrderViolation { step: u64, edge: usize },

    #[error("{0}")]
    InvalidArgument(String),

    #[error("cannot pick a fixed point automatically: {0}")]
    AmbiguousFixedPoint(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T, E = ErgmError> = std::result::Result<T, E>;
