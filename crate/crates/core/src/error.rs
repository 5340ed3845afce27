use thiserror::Error;

use crate::eos::EosFamily;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Everything that can go wrong in the model layer.
///
/// Numeric payloads are stored as `f64` regardless of the working scalar so
/// the error type stays non-generic.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid {family} parameters: {reason}")]
    Parameters { family: EosFamily, reason: String },

    #[error("density {rho} is not admissible for the {family} phase law")]
    Density { family: EosFamily, rho: f64 },

    #[error("pressure {pressure} is outside the range of the {family} phase law")]
    UnreachablePressure { family: EosFamily, pressure: f64 },

    #[error("root finder failed to converge for pressure {pressure} ({family})")]
    RootFinding { family: EosFamily, pressure: f64 },

    #[error("inadmissible state: {0}")]
    State(String),

    #[error("state is not at equilibrium: {0}")]
    NotEquilibrium(String),

    #[error("invalid relaxation parameters: {0}")]
    Relaxation(String),

    #[error("finite-difference step could not be kept inside the admissible set")]
    FiniteDifference,

    #[error("source integration failed after {halvings} step halvings: {reason}")]
    SourceStep { halvings: u32, reason: String },

    #[error("solver aborted at t = {t}: cell {cell} became inadmissible ({reason})")]
    Cell { t: f64, cell: usize, reason: String },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("invalid simulation setup: {0}")]
    Setup(String),
}
