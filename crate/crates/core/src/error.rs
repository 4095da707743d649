use thiserror::Error;

/// Errors raised by fitting, simulation, model I/O and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("empty matrix: {0}")]
    Empty(&'static str),

    #[error("invalid truncation policy: {0}")]
    Policy(String),

    #[error("structure {0} requires output snapshots but none were supplied")]
    MissingOutput(String),

    #[error("regressor is numerically zero; nothing to fit")]
    Singular,

    #[error("simulation diverged at step {step}: non-finite state")]
    Divergence { step: usize },

    #[error("time step must be positive, got {0}")]
    TimeStep(f64),

    #[error("reference signal has zero norm")]
    ZeroReference,

    #[error("dense allocation of {entries} entries refused; use the sparse path")]
    MemoryGuard { entries: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("structure mismatch: model is {model}, configuration expects {config}")]
    StructureMismatch { model: String, config: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for errors caused by user input rather than numerics.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::Parse { .. }
                | Error::StructureMismatch { .. }
                | Error::MissingOutput(_)
                | Error::Policy(_)
                | Error::TimeStep(_)
                | Error::Io(_)
                | Error::Csv(_)
        )
    }

    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
