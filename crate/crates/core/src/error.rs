use thiserror::Error;

use crate::matcher::Transcript;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("edge {edge} does not have exactly {r} distinct vertices")]
    NonUniformEdge { edge: usize, r: usize },

    #[error("vertex {vertex} out of range (num_vertices = {num_vertices})")]
    VertexOutOfRange { vertex: usize, num_vertices: usize },

    #[error("edge {edge} duplicates edge {first}")]
    DuplicateEdge { edge: usize, first: usize },

    #[error("codegree needs two distinct vertices, got {0} twice")]
    SameVertex(usize),

    #[error("unknown edge id {id} (num_edges = {num_edges})")]
    UnknownEdgeId { id: usize, num_edges: usize },

    #[error("bad tuple: {0}")]
    BadTuple(String),

    #[error("weight function indexes {expected} edges but the hypergraph has {actual}")]
    HostMismatch { expected: usize, actual: usize },

    #[error("invalid weight: {0}")]
    BadWeight(String),

    #[error("delta must lie in (0, 1), got {0}")]
    BadDelta(f64),

    #[error("uniformity r = {0} is too small; the pipeline needs r >= 2")]
    UniformityTooSmall(usize),

    #[error("bad parameters: {0}")]
    BadParams(String),

    #[error("instance too large: {0}")]
    TooLarge(String),

    #[error("{step} conditions still failing after {attempts} attempts")]
    RetriesExhausted {
        step: &'static str,
        attempts: usize,
        best: Box<Transcript>,
    },

    #[error("pattern rejected: {0}")]
    PatternRejected(String),

    #[error("colouring is not proper: {0}")]
    ImproperColouring(String),

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("infeasible parameters: {0}")]
    InfeasibleParams(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
