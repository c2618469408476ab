//! Monte Carlo estimation of `P(sup |xi_n| >= x)` and of tube probabilities.
//!
//! Estimates are reported together with the normalized log-rate
//! `-(1/n) ln p_hat`, the empirical counterpart of the supremum rate.

mod crude;
pub mod oracle;
mod splitting;
pub mod stats;
mod table;
mod tube;

use serde::{Deserialize, Serialize};

pub use crude::estimate_crude;
pub use oracle::{one_sided_sup_oracle, wiener_sup_oracle};
pub use splitting::{default_levels, estimate_splitting, estimate_splitting_with, SplittingConfig};
pub use table::{ldp_convergence_table, ConvergenceRow, ConvergenceTable, EstimatorBudget};
pub use tube::{tube_distance, tube_probability};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EstimatorKind {
    Crude,
    Splitting,
}

impl EstimatorKind {
    pub fn name(self) -> &'static str {
        match self {
            EstimatorKind::Crude => "crude",
            EstimatorKind::Splitting => "splitting",
        }
    }
}

/// Sample size of an estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trials {
    Crude {
        trials: u64,
        hits: u64,
    },
    Splitting {
        levels: usize,
        particles: usize,
        replicates: usize,
    },
}

/// One Monte Carlo estimate with a 95% interval.
///
/// Crude estimates use the Wilson interval; splitting estimates use the
/// 2.5% and 97.5% percentiles of independent replicate estimates. For tube
/// probabilities `x` holds the tube radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub lambda: f64,
    pub n: u32,
    pub x: f64,
    pub estimator: EstimatorKind,
    pub trials: Trials,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// `-(1/n) ln p_hat`; `+inf` (JSON `null`) when `p_hat == 0`.
    pub log_rate: f64,
    /// Mean conditional crossing frequency per splitting stage.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub stage_probabilities: Vec<f64>,
    /// Per-replicate splitting estimates.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub replicate_estimates: Vec<f64>,
    pub seed: u64,
}

impl McEstimate {
    pub fn log_rate_finite(&self) -> bool {
        self.log_rate.is_finite()
    }

    pub fn ci_contains(&self, value: f64) -> bool {
        self.ci_low <= value && value <= self.ci_high
    }

    pub fn ci_overlaps(&self, other: &McEstimate) -> bool {
        self.ci_low <= other.ci_high && other.ci_low <= self.ci_high
    }
}

pub(crate) fn log_rate(p_hat: f64, n: u32) -> f64 {
    if p_hat <= 0.0 {
        f64::INFINITY
    } else {
        // + 0.0 turns -0.0 into 0.0 when p_hat == 1
        -p_hat.ln() / f64::from(n) + 0.0
    }
}
