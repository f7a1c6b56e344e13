//! Simulation and analysis toolkit for a discrete-time quantum walk on a line
//! whose coin undergoes non-Markovian dephasing.
//!
//! The crate is organized around five subsystems:
//!
//! - [`kernel`]: the reservoir correlation function, the decoherence function
//!   `kappa(t)` (closed form and Volterra solver) and the instantaneous
//!   dephasing rates.
//! - [`channel`]: the coin dephasing map, its Kraus representation and the
//!   per-step scheduling of coherence factors.
//! - [`walk`]: density-matrix evolution of the walker+coin system in the
//!   position basis, position distributions and moments.
//! - [`correlations`]: von Neumann entropy, quantum mutual information,
//!   measurement-induced disturbance and quantum discord along a trajectory.
//! - [`momentum`]: Bloch-representation superoperator analysis giving exact
//!   finite-time moments via geometric matrix sums and their long-time
//!   closed forms.

pub mod channel;
pub mod correlations;
pub mod csv;
pub mod error;
pub mod kernel;
pub mod momentum;
pub mod walk;

pub use channel::{dephase, kraus_pair, schedule, CoinDensity, KrausPair, ScheduleMode, StepSchedule};
pub use correlations::{
    correlation_record, correlation_trajectory, discord, measured_state, mid, mutual_information,
    von_neumann_entropy, CorrelationOpts, CorrelationRecord, DiscordResult, MeasurementBasis,
};
pub use error::Error;
pub use kernel::{
    correlation_function, kappa_closed_form, kappa_volterra, rates, sample_closed_form,
    volterra_solve, DecoherenceFunction, KernelParams, RateSample, Regime,
};
pub use momentum::{
    build_mk, first_moment_exact, longtime_first_moment, longtime_variance, second_moment_exact,
    BlochVector, MomentumMatrix, QuadratureSettings,
};
pub use walk::{
    classical_rw_distribution, dispersion, evolve, evolve_collect, moments,
    position_distribution, variance, CoinOperator, Evolution, JointState, PositionDistribution,
    WalkConfig,
};

/// Complex scalar type used throughout the crate.
pub type C64 = num_complex::Complex64;
