use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("grid dimensions {rows}x{cols} too small, need at least 2x2")]
    DimensionTooSmall { rows: usize, cols: usize },

    #[error("edge ({0}, {1}) is a self loop")]
    SelfLoop(usize, usize),

    #[error("edge ({0}, {1}) appears twice")]
    DuplicateEdge(usize, usize),

    #[error("edge ({a}, {b}) references a vertex outside 0..{n}")]
    EdgeOutOfRange { a: usize, b: usize, n: usize },

    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("vertices {0} and {1} share the value {2}")]
    DuplicateValue(usize, usize, f64),

    #[error("value of vertex {0} is not finite")]
    NonFinite(usize),

    #[error("domain is disconnected")]
    Disconnected,

    #[error("unknown vertex {0}")]
    UnknownVertex(usize),

    #[error("fields live on different domains")]
    DomainMismatch,

    #[error("abstract merge tree invariant violated: {0}")]
    InvariantViolation(String),

    #[error("size guard exceeded: {what} has {count} > {limit}")]
    Guard {
        what: &'static str,
        count: usize,
        limit: usize,
    },

    #[error("label scheme {0} does not apply to this input")]
    SchemeMismatch(&'static str),

    #[error("inconsistent mapping: {0}")]
    InconsistentMapping(String),

    #[error("edit operation {step} not applicable: {reason}")]
    Inapplicable { step: usize, reason: String },

    #[error("fields do not differ by a minimal vertex perturbation: {0}")]
    NotMinimal(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("intermediate value of vertex {0} collides with vertex {1}")]
    IntermediateTie(usize, usize),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn is_guard(&self) -> bool {
        matches!(self, Error::Guard { .. })
    }
}
