use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("self-loop at node {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {from} -> {to}")]
    DuplicateEdge { from: usize, to: usize },
    #[error("{what} index {index} out of range for {n} nodes")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        n: usize,
    },
    #[error("non-finite value in field `{0}`")]
    NonFiniteValue(String),
    #[error("horizon must be positive")]
    NonPositiveHorizon,
    #[error("a problem needs at least 2 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("field `{field}` has length {found}, expected {expected}")]
    LengthMismatch {
        field: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("parse error: {0}")]
    Parse(String),

    #[error("non-finite value produced in {0}")]
    NonFinite(&'static str),
    #[error("positivity lost at component {component} (step {step})")]
    PositivityLost { step: usize, component: usize },
    #[error("component {component} fell below the normal float range relative to the largest (step {step})")]
    Underflow { step: usize, component: usize },
    #[error("no convergence after {0} iterations")]
    NoConvergence(usize),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("overflow evaluating exponential at neighbor slot {0}")]
    Overflow(usize),

    #[error("time {0} outside the horizon")]
    OutOfRange(f64),
    #[error("time grids differ")]
    GridMismatch,
    #[error("graph is not strongly connected")]
    NotStronglyConnected,
    #[error("internal positivity violation: {0}")]
    InternalPositivityViolation(String),
    #[error("non-finite or negative intensity at node {node}, time {t}")]
    NonFiniteIntensity { node: usize, t: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
