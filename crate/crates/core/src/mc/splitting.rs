//! Fixed-effort multilevel splitting on the running maximum of `|xi_n|`.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::quantile;
use super::{log_rate, EstimatorKind, McEstimate, Trials};
use crate::error::{invalid, Error, Result};
use crate::process::{ModelParams, ProcessState, Walker};
use crate::rng::{stream, Domain};
use crate::sup::sup_rate;

/// Upper bound on the number of levels chosen automatically.
pub const MAX_LEVELS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplittingConfig {
    /// Number of levels; `None` picks [`default_levels`].
    pub levels: Option<usize>,
    pub particles: usize,
    pub replicates: usize,
}

impl SplittingConfig {
    pub fn new(particles: usize) -> Self {
        Self {
            levels: None,
            particles,
            replicates: 10,
        }
    }
}

/// `ceil(n * I_sup(x) / 1.5)` clamped to `[1, 40]`, which keeps each stage's
/// conditional probability near `e^{-1.5}`.
pub fn default_levels(lambda: f64, n: u32, x: f64) -> usize {
    let target = f64::from(n) * sup_rate(x, lambda).rate / 1.5;
    if !target.is_finite() {
        return MAX_LEVELS;
    }
    (target.ceil() as usize).clamp(1, MAX_LEVELS)
}

/// Splitting estimate with `levels` uniform levels, `particles` per stage,
/// and 10 replicates.
pub fn estimate_splitting(params: &ModelParams, x: f64, levels: usize, particles: usize) -> Result<McEstimate> {
    estimate_splitting_with(
        params,
        x,
        &SplittingConfig {
            levels: Some(levels),
            particles,
            replicates: 10,
        },
    )
}

/// Splitting estimate of `P(sup |xi_n| >= x)`.
///
/// Levels are `x k / L` for `k = 1..=L`. Stage `k` continues the process from
/// stored states that reached level `k - 1`; the restart is exact because
/// the state `(t, xi_n, w_n, anchor)` is Markov. The estimate is the mean of
/// the replicate products of stage frequencies.
pub fn estimate_splitting_with(params: &ModelParams, x: f64, config: &SplittingConfig) -> Result<McEstimate> {
    params.validate()?;
    if !(x >= 0.0 && x.is_finite()) {
        return Err(invalid("x", format!("level must be finite and >= 0, got {x}")));
    }
    if config.particles < 2 {
        return Err(invalid("particles", "must be >= 2"));
    }
    if config.replicates < 1 {
        return Err(invalid("replicates", "must be >= 1"));
    }
    let levels = config
        .levels
        .unwrap_or_else(|| default_levels(params.lambda, params.n, x));
    if levels < 1 {
        return Err(invalid("levels", "must be >= 1"));
    }
    let trials = Trials::Splitting {
        levels,
        particles: config.particles,
        replicates: config.replicates,
    };

    if x == 0.0 {
        return Ok(McEstimate {
            lambda: params.lambda,
            n: params.n,
            x,
            estimator: EstimatorKind::Splitting,
            trials,
            p_hat: 1.0,
            ci_low: 1.0,
            ci_high: 1.0,
            log_rate: 0.0,
            stage_probabilities: vec![1.0; levels],
            replicate_estimates: vec![1.0; config.replicates],
            seed: params.seed,
        });
    }

    let mut replicate_estimates = Vec::with_capacity(config.replicates);
    let mut stage_sums = vec![0.0; levels];
    for r in 0..config.replicates {
        let stages = run_replicate(params, x, levels, config.particles, r)?;
        for (sum, p) in stage_sums.iter_mut().zip(&stages) {
            *sum += p;
        }
        replicate_estimates.push(stages.iter().product::<f64>());
    }

    let p_hat = replicate_estimates.iter().sum::<f64>() / replicate_estimates.len() as f64;
    let mut sorted = replicate_estimates.clone();
    sorted.sort_by(f64::total_cmp);
    let ci_low = quantile(&sorted, 0.025).min(p_hat);
    let ci_high = quantile(&sorted, 0.975).max(p_hat);
    Ok(McEstimate {
        lambda: params.lambda,
        n: params.n,
        x,
        estimator: EstimatorKind::Splitting,
        trials,
        p_hat,
        ci_low,
        ci_high,
        log_rate: log_rate(p_hat, params.n),
        stage_probabilities: stage_sums.iter().map(|s| s / config.replicates as f64).collect(),
        replicate_estimates,
        seed: params.seed,
    })
}

fn run_replicate(params: &ModelParams, x: f64, levels: usize, particles: usize, replicate: usize) -> Result<Vec<f64>> {
    let mut starts = vec![ProcessState::origin(); particles];
    let mut stage_probabilities = Vec::with_capacity(levels);
    for stage in 0..levels {
        let level = if stage + 1 == levels {
            x
        } else {
            x * (stage + 1) as f64 / levels as f64
        };
        let scope = [replicate as u64, stage as u64];
        let survivors: Vec<ProcessState> = starts
            .par_iter()
            .enumerate()
            .filter_map(|(j, start)| {
                let mut rng = stream(params.seed, Domain::Splitting, &scope, j as u64);
                let mut walker = Walker::lazy(params, *start, &mut rng);
                walker.run_until_level(level, &mut rng).then(|| *walker.state())
            })
            .collect();
        if survivors.is_empty() {
            return Err(Error::Extinction {
                replicate,
                stage: stage + 1,
                level,
            });
        }
        stage_probabilities.push(survivors.len() as f64 / particles as f64);
        if stage + 1 < levels {
            let mut rng = stream(params.seed, Domain::Resample, &scope, 0);
            starts = (0..particles)
                .map(|_| survivors[rng.random_range(0..survivors.len())])
                .collect();
        }
    }
    Ok(stage_probabilities)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_ladder() {
        // n I_sup = 8 sqrt(2) ~ 11.3 -> 8 levels
        assert_eq!(default_levels(1.0, 8, 1.0), 8);
        assert_eq!(default_levels(1.0, 1, 0.0), 1);
        assert_eq!(default_levels(1.0, 1000, 5.0), MAX_LEVELS);
    }

    #[test]
    fn zero_level_degenerate() {
        let params = ModelParams::new(1.0, 4).with_grid_points(32);
        let e = estimate_splitting(&params, 0.0, 3, 10).unwrap();
        assert_eq!(e.p_hat, 1.0);
        assert_eq!(e.log_rate, 0.0);
    }

    #[test]
    fn extinction_reported() {
        let params = ModelParams::new(1.0, 40).with_grid_points(32);
        let err = estimate_splitting(&params, 30.0, 2, 4).unwrap_err();
        assert!(matches!(err, Error::Extinction { stage: 1, replicate: 0, .. }), "{err:?}");
    }

    #[test]
    fn reproducible_and_bounded() {
        let params = ModelParams::new(1.0, 2).with_grid_points(64).with_seed(5).with_bridge_correction(true);
        let a = estimate_splitting(&params, 1.0, 3, 200).unwrap();
        let b = estimate_splitting(&params, 1.0, 3, 200).unwrap();
        assert_eq!(a, b);
        assert!(a.ci_low <= a.p_hat && a.p_hat <= a.ci_high);
        assert!(a.p_hat > 0.0 && a.p_hat < 1.0);
        assert_eq!(a.replicate_estimates.len(), 10);
    }

    #[test]
    fn rejects_bad_config() {
        let params = ModelParams::new(1.0, 2);
        assert!(estimate_splitting(&params, 1.0, 3, 1).is_err());
        assert!(estimate_splitting(&params, 1.0, 0, 10).is_err());
    }
}
