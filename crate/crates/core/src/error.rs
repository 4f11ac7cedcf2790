use crate::graph::Diameter;
use crate::instance::Colour;

/// Errors raised by the solver library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("unknown vertex {0}")]
    UnknownVertex(usize),
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("cannot merge vertex {0} with itself")]
    SelfMerge(usize),
    #[error("cannot merge adjacent vertices {0} and {1}")]
    AdjacentMerge(usize, usize),
    #[error("colour {colour} is not in the list of vertex {vertex}")]
    ColourNotInList { vertex: usize, colour: Colour },
    #[error("vertex {vertex} has a list of size {size}; at most {max} allowed here")]
    ListTooLarge { vertex: usize, size: usize, max: usize },
    #[error("vertex {vertex} has a list of size {size}; at least {min} required here")]
    ListTooSmall { vertex: usize, size: usize, min: usize },
    #[error("list assignment has {lists} entries for a graph with {vertices} vertices")]
    ListCountMismatch { lists: usize, vertices: usize },
    #[error("graph diameter is {measured}, the strict policy requires at most 3")]
    DiameterTooLarge { measured: Diameter },
    #[error("oracle budget of {budget} nodes exhausted")]
    Indeterminate { budget: u64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid generator parameters: {0}")]
    InvalidGenParams(String),
    #[error("missing colouring: {0}")]
    MissingColouring(String),
    #[error(transparent)]
    Parse(#[from] crate::io::ParseError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
