use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {vertex} out of range for graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),

    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degree distribution has no mass on [{k_min}, {k_max}]")]
    EmptySupport { k_min: usize, k_max: usize },

    #[error("degree sequence is not graphical")]
    NonGraphical,

    #[error("could not realize degree sequence within {attempts} rewiring attempts")]
    RewireExhausted { attempts: usize },

    #[error("graph is not connected")]
    Disconnected,

    #[error("vertices {from} and {to} are not connected")]
    DisconnectedPair { from: usize, to: usize },

    #[error("graph has {n} vertices, limit for this operation is {limit}")]
    GraphTooLarge { n: usize, limit: usize },

    #[error("pair ({from}, {to}) has more than {limit} shortest paths")]
    TooManyPaths { from: usize, to: usize, limit: usize },

    #[error("placement needs {requested} distinct vertices but graph has {n}")]
    BudgetExceedsGraph { requested: usize, n: usize },

    #[error("nothing was sampled")]
    NothingSampled,

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("bad graph spec: {0}")]
    GraphSpec(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse { line, message: message.into() }
    }

    /// True for errors caused by user input (configuration, specs, files
    /// that do not parse) as opposed to failures while running.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_)
                | Error::Parse { .. }
                | Error::GraphSpec(_)
                | Error::BudgetExceedsGraph { .. }
        )
    }
}
