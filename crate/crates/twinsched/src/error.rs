//! Error type shared across the crate.

use std::path::PathBuf;

/// Everything that can go wrong when building instances, stepping the
/// environment, training, or running experiments.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A schedule order is not a permutation of `0..n`.
    #[error("order is not a permutation of 0..{n}")]
    InvalidPermutation { n: usize },

    /// A queue position index is outside the schedule.
    #[error("queue position {position} out of range for {n} tasks")]
    PositionOutOfRange { position: usize, n: usize },

    /// A schedule and an instance disagree on the number of tasks.
    #[error("schedule has {schedule} entries but instance has {instance} tasks")]
    LengthMismatch { schedule: usize, instance: usize },

    /// Exhaustive search was requested above the permutation limit.
    #[error("exhaustive search over {n} tasks exceeds the oracle limit of {limit}")]
    OracleInfeasible { n: usize, limit: usize },

    /// The chosen task is already scheduled or does not exist.
    #[error("task {task} is not a valid action in this state")]
    InvalidAction { task: usize },

    /// An action was requested from an empty candidate set.
    #[error("no valid actions to choose from")]
    NoValidActions,

    /// Q-tables built for different action counts cannot be combined.
    #[error("tables disagree on action count: {left} vs {right}")]
    TableShapeMismatch { left: usize, right: usize },

    /// Invalid parameter, bound, or configuration value.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A policy reported a cost below the exhaustive optimum, which can
    /// only mean a bug in the oracle or the simulator.
    #[error("achieved cost {achieved} is below the oracle optimum {oracle}")]
    CostBelowOracle { achieved: f64, oracle: f64 },

    /// Malformed Q-table dump.
    #[error("bad table dump at line {line}: {reason}")]
    BadTableDump { line: usize, reason: String },

    /// I/O failure, annotated with the path involved.
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Configuration error with the given message.
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// I/O error annotated with the path it concerns.
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
