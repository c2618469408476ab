use rayon::prelude::*;

use super::stats::{wilson_interval, Z95};
use super::{log_rate, EstimatorKind, McEstimate, Trials};
use crate::error::{invalid, Result};
use crate::process::{ModelParams, ProcessState, Walker};
use crate::rng::{stream, Domain};

/// Fraction of independent trajectories whose supremum of `|xi_n|` reaches
/// `x`, with a Wilson 95% interval.
///
/// Trial `i` always uses stream `i` of the run seed, so the estimate does
/// not depend on the number of worker threads.
pub fn estimate_crude(params: &ModelParams, x: f64, trials: u64) -> Result<McEstimate> {
    params.validate()?;
    if trials == 0 {
        return Err(invalid("trials", "must be >= 1"));
    }
    if !(x >= 0.0) {
        return Err(invalid("x", format!("level must be >= 0, got {x}")));
    }
    let hits = (0..trials)
        .into_par_iter()
        .filter(|&i| {
            let mut rng = stream(params.seed, Domain::Crude, &[], i);
            let mut walker = Walker::lazy(params, ProcessState::origin(), &mut rng);
            walker.run_until_level(x, &mut rng)
        })
        .count() as u64;
    let p_hat = hits as f64 / trials as f64;
    let (ci_low, ci_high) = wilson_interval(hits, trials, Z95);
    Ok(McEstimate {
        lambda: params.lambda,
        n: params.n,
        x,
        estimator: EstimatorKind::Crude,
        trials: Trials::Crude { trials, hits },
        p_hat,
        ci_low: ci_low.min(p_hat),
        ci_high: ci_high.max(p_hat),
        log_rate: log_rate(p_hat, params.n),
        stage_probabilities: Vec::new(),
        replicate_estimates: Vec::new(),
        seed: params.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_level_is_certain() {
        let params = ModelParams::new(1.0, 3).with_grid_points(64);
        let e = estimate_crude(&params, 0.0, 50).unwrap();
        assert_eq!(e.p_hat, 1.0);
        assert_eq!(e.log_rate, 0.0);
    }

    #[test]
    fn unreachable_level_gives_infinite_rate() {
        let params = ModelParams::new(1.0, 50).with_grid_points(64);
        let e = estimate_crude(&params, 50.0, 20).unwrap();
        assert_eq!(e.p_hat, 0.0);
        assert!(e.log_rate.is_infinite());
        assert!(e.ci_low <= e.p_hat && e.p_hat <= e.ci_high);
    }

    #[test]
    fn reproducible() {
        let params = ModelParams::new(1.0, 2).with_grid_points(64).with_seed(9).with_bridge_correction(true);
        assert_eq!(
            estimate_crude(&params, 0.5, 500).unwrap(),
            estimate_crude(&params, 0.5, 500).unwrap()
        );
    }

    #[test]
    fn rejects_zero_trials() {
        assert!(estimate_crude(&ModelParams::new(1.0, 1), 1.0, 0).is_err());
    }
}
