use thiserror::Error;

use crate::model::Notion;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid assignment: {0}")]
    InvalidAssignment(String),

    #[error("unoccupied vertex has no utility (vertex {0})")]
    UnoccupiedVertex(usize),

    #[error("assignment is partial: {placed} of {required} agents placed")]
    PartialAssignment { placed: usize, required: usize },

    #[error("vector length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("{0} is not a pairwise domination relation")]
    NotPairwise(Notion),

    #[error("instance too large for oracle: {count} assignments exceed budget {budget}")]
    BudgetExceeded { count: u128, budget: u128 },

    #[error("invalid tree decomposition: {0}")]
    InvalidDecomposition(String),

    #[error("exact decomposition supports at most {max} vertices, graph has {actual}")]
    ExactTooLarge { max: usize, actual: usize },

    #[error("no valid root class")]
    NoRootClass,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid reduction input: {0}")]
    InvalidSource(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("arithmetic overflow in exact rational computation")]
    Overflow,
}
