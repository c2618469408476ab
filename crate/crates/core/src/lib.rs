//! Simulation and large-deviation toolkit for Brownian motion with
//! Poissonian resetting to the origin.
//!
//! * [`process`]: exact simulation of the scaled reset process `xi_n`.
//! * [`path`] and [`rate`]: piecewise-linear paths and closed-form rate
//!   functionals.
//! * [`sup`]: the supremum rate, its optimal paths, and a variational
//!   minimizer over discretized paths.
//! * [`mc`]: crude and splitting Monte Carlo, Brownian exit oracles, and
//!   log-rate convergence tables.
//! * [`emit`]: CSV and JSON writers shared by the command-line tool.

pub mod emit;
pub mod error;
pub mod mc;
pub mod path;
pub mod process;
pub mod rate;
pub mod rng;
pub mod sup;

pub use error::{Error, Result};
pub use mc::{
    estimate_crude, estimate_splitting, ldp_convergence_table, tube_probability, wiener_sup_oracle, ConvergenceTable,
    EstimatorBudget, EstimatorKind, McEstimate,
};
pub use path::PiecewiseLinearPath;
pub use process::{simulate_reset_epochs, simulate_trajectory, sup_abs_of, ModelParams, TrajectorySample};
pub use rate::{classify_tilde_ac0, nonzero_measure, rate_poisson, rate_reset, rate_wiener, RateResult, Violation};
pub use sup::{optimal_path, sup_rate, variational_minimize, Regime, SupRatePoint, VariationalResult};
