use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("edge {{{0}, {1}}} listed more than once")]
    DuplicateEdge(usize, usize),
    #[error("edge multiplicity {0} outside 1..=255")]
    BadMultiplicity(u32),
    #[error("color ids must form a contiguous range starting at 0")]
    NonContiguousColors,
    #[error("operation requires a simple graph (all multiplicities 1)")]
    NotSimple,
    #[error("vertex sets overlap")]
    OverlappingSets,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("partition is not equitable")]
    NotEquitable,
    #[error("size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("matrix is not doubly stochastic")]
    NotDoublyStochastic,
    #[error("malformed circuit: {0}")]
    MalformedCircuit(String),
}
