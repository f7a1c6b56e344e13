//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by constructors, solvers and analysis operations.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// A kernel or solver parameter is out of its documented range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A coherence factor with |kappa| > 1 would violate positivity of the
    /// dephasing map.
    #[error("coherence factor |kappa| = {0} exceeds 1")]
    KappaOutOfRange(f64),

    /// A density matrix failed a physicality check (trace, Hermiticity or
    /// positivity).
    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    /// A walk step would move probability outside the allocated lattice.
    #[error("lattice overflow: step {step} exceeds half-width {half_width}")]
    LatticeOverflow { step: usize, half_width: usize },

    /// The resolvent (1 - M_k)^-1 does not exist at |kappa| = 1.
    #[error("ideal-walk resolvent singular: exact moments require |kappa| < 1")]
    ResolventSingular,

    /// A query fell outside the sampled range of a decoherence function.
    #[error("time {t} outside sampled range [0, {t_max}]")]
    OutOfRange { t: f64, t_max: f64 },
}

/// Convenience alias used by fallible operations in this crate.
pub type Result<T> = std::result::Result<T, Error>;
