//! Crate-wide error type.
//!
//! Domain errors (bad scenario data, infeasible profiles, solver
//! non-convergence) are reported through [`Error`]; plain programming errors
//! (negative SNR passed to `cap`, slot index out of range) panic with a
//! message instead, mirroring slice-indexing conventions.

use crate::sense_opt::PowerProfile;

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// All failure modes surfaced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A numeric argument violates its documented domain
    /// (e.g. `h21_sq = 0` where `INR_C` must be formed, or `beta = 1`
    /// in a water-filling case that divides by `1 - beta`).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A scenario file parsed but its contents violate an invariant
    /// (pmf does not sum to one, probability outside [0, 1], ...).
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    /// Scenario JSON could not be parsed at all (includes unknown keys,
    /// which are rejected).
    #[error("scenario parse error: {0}")]
    ScenarioParse(#[from] serde_json::Error),

    /// Scenario file could not be read.
    #[error("scenario io error: {0}")]
    ScenarioIo(#[from] std::io::Error),

    /// A power profile handed to a rate evaluation violates the INR, SIC,
    /// or average-power constraints beyond tolerance.
    #[error("infeasible profile: {0}")]
    InfeasibleProfile(String),

    /// An iterative solver hit its iteration cap. The best iterate found so
    /// far is attached so callers can still inspect it.
    #[error("solver did not converge after {iters} iterations (best rate {best_rate})")]
    NonConvergence {
        iters: usize,
        best_rate: f64,
        best: Box<PowerProfile>,
    },
}
