use thiserror::Error;

/// Errors raised by the simulation engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("position {value} outside extent [{lo}, {hi}] on axis {axis}")]
    OutOfDomain {
        axis: usize,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("non-finite force on cortege {cortege_id}")]
    NonFiniteForce { cortege_id: u64 },

    #[error("amplitude grain {epsilon} annihilates every entry of the state")]
    Annihilation { epsilon: f64 },

    #[error("selection collapsed at iteration {iteration}: no right group to imitate")]
    SelectionCollapse { iteration: usize },

    #[error("solver instability: norm drift {drift:e} at step {step}")]
    SolverInstability { step: usize, drift: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("unsupported scenario: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Module the failure originates from, for user-facing messages.
    pub fn module(&self) -> &'static str {
        match self {
            Error::OutOfDomain { .. } => "lattice",
            Error::NonFiniteForce { .. } => "swarm-dynamics",
            Error::Annihilation { .. } => "wavefield",
            Error::SelectionCollapse { .. } => "selection",
            Error::SolverInstability { .. } | Error::GridMismatch(_) => "oracle",
            Error::Unsupported(_) | Error::Config(_) | Error::Parse(_) | Error::Io { .. } => "scenario",
            Error::Contract(_) => "core",
        }
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
