use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A size cap (matrix materialisation, column sweep) would be exceeded.
    #[error("resource limit: {0}")]
    Resource(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("no data supplied")]
    EmptyData,

    #[error("simulation budget exceeded: {requested} draws requested, limit is {limit}")]
    Budget { requested: u128, limit: u128 },

    /// The LP solver reported a state that cannot occur for a well-posed
    /// staircase program.
    #[error("internal solver error: {0}")]
    Solver(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
