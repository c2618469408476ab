use serde::{Deserialize, Serialize};

use super::{estimate_crude, estimate_splitting_with, EstimatorKind, McEstimate, SplittingConfig};
use crate::error::{invalid, Result};
use crate::process::{ModelParams, DEFAULT_GRID_POINTS};
use crate::rng::mix_key;
use crate::sup::sup_rate;

/// Simulation budget for a convergence study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorBudget {
    pub crude_trials: u64,
    pub splitting: SplittingConfig,
    /// Use crude Monte Carlo when `exp(-n I_sup(x))` is at least this.
    pub crude_threshold: f64,
    pub grid_points: usize,
    pub bridge_correction: bool,
    pub seed: u64,
}

impl Default for EstimatorBudget {
    fn default() -> Self {
        Self {
            crude_trials: 1_000_000,
            splitting: SplittingConfig {
                levels: None,
                particles: 2000,
                replicates: 10,
            },
            crude_threshold: 1e-4,
            grid_points: DEFAULT_GRID_POINTS,
            bridge_correction: true,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: u32,
    pub estimate: McEstimate,
}

impl ConvergenceRow {
    pub fn estimator(&self) -> EstimatorKind {
        self.estimate.estimator
    }

    pub fn log_rate(&self) -> f64 {
        self.estimate.log_rate
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub lambda: f64,
    pub x: f64,
    /// Closed-form supremum rate the log-rates should approach.
    pub target_rate: f64,
    pub rows: Vec<ConvergenceRow>,
    /// `2 r_{2n} - r_n` for the last pair `(n, 2n)` in the table.
    pub richardson: Option<f64>,
}

impl ConvergenceTable {
    pub fn log_rates(&self) -> Vec<f64> {
        self.rows.iter().map(ConvergenceRow::log_rate).collect()
    }
}

/// Estimates `-(1/n) ln P(sup |xi_n| >= x)` for each `n`, choosing crude
/// Monte Carlo or splitting from the asymptotic guide `exp(-n I_sup(x))`.
///
/// Each `n` runs on its own seed derived from `budget.seed`.
pub fn ldp_convergence_table(lambda: f64, x: f64, n_list: &[u32], budget: &EstimatorBudget) -> Result<ConvergenceTable> {
    if n_list.is_empty() {
        return Err(invalid("n_list", "must be nonempty"));
    }
    if !n_list.windows(2).all(|w| w[0] < w[1]) {
        return Err(invalid("n_list", "must be strictly increasing"));
    }
    if !(lambda > 0.0) {
        return Err(invalid("lambda", format!("must be > 0, got {lambda}")));
    }
    let target_rate = sup_rate(x, lambda).rate;
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let params = ModelParams::new(lambda, n)
            .with_grid_points(budget.grid_points)
            .with_bridge_correction(budget.bridge_correction)
            .with_seed(mix_key(budget.seed, &[u64::from(n)]));
        let guide = (-f64::from(n) * target_rate).exp();
        let estimate = if guide >= budget.crude_threshold {
            estimate_crude(&params, x, budget.crude_trials)?
        } else {
            estimate_splitting_with(&params, x, &budget.splitting)?
        };
        rows.push(ConvergenceRow { n, estimate });
    }
    let richardson = richardson(&rows);
    Ok(ConvergenceTable {
        lambda,
        x,
        target_rate,
        rows,
        richardson,
    })
}

fn richardson(rows: &[ConvergenceRow]) -> Option<f64> {
    rows.iter()
        .rev()
        .find_map(|big| {
            rows.iter()
                .find(|small| 2 * small.n == big.n)
                .map(|small| 2.0 * big.log_rate() - small.log_rate())
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_budget() -> EstimatorBudget {
        EstimatorBudget {
            crude_trials: 200,
            splitting: SplittingConfig {
                levels: None,
                particles: 300,
                replicates: 2,
            },
            grid_points: 64,
            ..EstimatorBudget::default()
        }
    }

    #[test]
    fn zero_level_rows() {
        let t = ldp_convergence_table(1.0, 0.0, &[1, 2, 4], &small_budget()).unwrap();
        assert_eq!(t.target_rate, 0.0);
        for row in &t.rows {
            assert_eq!(row.estimate.p_hat, 1.0);
            assert_eq!(row.log_rate(), 0.0);
        }
        assert_eq!(t.richardson, Some(0.0));
    }

    #[test]
    fn estimator_switch() {
        let t = ldp_convergence_table(1.0, 1.0, &[1, 8], &small_budget()).unwrap();
        assert_eq!(t.rows[0].estimator(), EstimatorKind::Crude);
        assert_eq!(t.rows[1].estimator(), EstimatorKind::Splitting);
        assert_eq!(t.richardson, None);
    }

    #[test]
    fn rejects_unsorted() {
        assert!(ldp_convergence_table(1.0, 1.0, &[4, 2], &small_budget()).is_err());
        assert!(ldp_convergence_table(1.0, 1.0, &[], &small_budget()).is_err());
    }
}
