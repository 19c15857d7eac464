use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Error)]
pub enum Error {
    /// A network system violates one of its structural invariants.
    #[error("invalid network system: {0}")]
    InvalidSystem(String),

    /// An argument is outside the domain of the operation.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An exhaustive computation would exceed its size guard.
    #[error("{what} exceeds the cap of {cap}")]
    SizeLimit { what: String, cap: u128 },

    /// No feasible route reaches the final slot.
    #[error("no feasible route for user {user}")]
    Infeasible { user: usize },

    /// A scenario or results file could not be read or written.
    #[error("config error: {0}")]
    Config(String),

    /// A Monte-Carlo run failed.
    #[error("run {run}: {source}")]
    Run { run: usize, source: Box<Error> },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn system(msg: impl Into<String>) -> Self {
        Error::InvalidSystem(msg.into())
    }

    pub(crate) fn size(what: impl Into<String>, cap: u128) -> Self {
        Error::SizeLimit {
            what: what.into(),
            cap,
        }
    }
}
