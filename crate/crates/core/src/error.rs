use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("operator too large for dense storage: {qubits} qubits (limit {limit})")]
    SizeGuard { qubits: usize, limit: usize },

    #[error("propagation did not converge{}: residual estimate {residual:e}", grid_index.map(|i| format!(" at grid index {i}")).unwrap_or_default())]
    Propagation {
        residual: f64,
        grid_index: Option<usize>,
    },

    #[error("no plateau found in environment distinguishability: {0}")]
    NoPlateau(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("scenario {scenario}: {source}")]
    Scenario {
        scenario: String,
        #[source]
        source: Box<Error>,
    },
}

/// Coarse classification used for process exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Physics,
    Io,
}

impl Error {
    /// Attach the failing grid index to a propagation error.
    pub fn at_grid_index(self, index: usize) -> Self {
        match self {
            Error::Propagation { residual, .. } => Error::Propagation {
                residual,
                grid_index: Some(index),
            },
            other => other,
        }
    }

    pub fn in_scenario(self, scenario: impl Into<String>) -> Self {
        match self {
            e @ Error::Scenario { .. } => e,
            e => Error::Scenario {
                scenario: scenario.into(),
                source: Box::new(e),
            },
        }
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Config(_) => ErrorKind::Config,
            Error::Io(_) => ErrorKind::Io,
            Error::Scenario { source, .. } => source.kind(),
            _ => ErrorKind::Physics,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
