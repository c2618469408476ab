use rayon::prelude::*;

use super::stats::{wilson_interval, Z95};
use super::{log_rate, EstimatorKind, McEstimate, Trials};
use crate::error::{invalid, Result};
use crate::path::{LinearPiece, PiecewiseLinearPath};
use crate::process::{ModelParams, ProcessState, Walker};
use crate::rng::{stream, Domain, StreamRng};

/// Cursor over the pieces of a path for increasing query times.
struct PathCursor {
    pieces: Vec<LinearPiece>,
    idx: usize,
}

impl PathCursor {
    fn new(path: &PiecewiseLinearPath) -> Self {
        Self {
            pieces: path.pieces(),
            idx: 0,
        }
    }

    /// (right value at t0, left limit at t1) for `t0 < t1` on the merged grid.
    fn span(&mut self, t0: f64, t1: f64) -> (f64, f64) {
        while self.idx + 1 < self.pieces.len() && self.pieces[self.idx].t1 <= t0 {
            self.idx += 1;
        }
        let start = eval(&self.pieces[self.idx], t0);
        let mut j = self.idx;
        while j + 1 < self.pieces.len() && self.pieces[j].t1 < t1 {
            j += 1;
        }
        (start, eval(&self.pieces[j], t1))
    }
}

fn eval(p: &LinearPiece, t: f64) -> f64 {
    if t >= p.t1 {
        p.end
    } else {
        p.start + (p.end - p.start) * ((t - p.t0) / p.len())
    }
}

/// `∫ |g|` over an interval of length `dt` for `g` linear from `d0` to `d1`.
fn abs_linear_integral(d0: f64, d1: f64, dt: f64) -> f64 {
    if d0 * d1 >= 0.0 {
        0.5 * (d0.abs() + d1.abs()) * dt
    } else {
        0.5 * (d0 * d0 + d1 * d1) / (d0.abs() + d1.abs()) * dt
    }
}

fn distance_with_cutoff(params: &ModelParams, path: &PiecewiseLinearPath, rng: &mut StreamRng, cutoff: f64) -> f64 {
    let mut cursor = PathCursor::new(path);
    let mut walker = Walker::lazy(params, ProcessState::origin(), rng);
    let mut total = 0.0;
    while let Some(seg) = walker.step(rng) {
        let (f0, f1) = cursor.span(seg.t0, seg.t1);
        total += abs_linear_integral(seg.start - f0, seg.end_left - f1, seg.t1 - seg.t0);
        if total >= cutoff {
            break;
        }
    }
    total
}

/// `∫_0^1 |xi_n - f| dt` for trial `trial` of the run, integrating the
/// linear interpolant between merged-grid nodes exactly.
pub fn tube_distance(params: &ModelParams, path: &PiecewiseLinearPath, trial: u64) -> f64 {
    let params = params.with_bridge_correction(false);
    let mut rng = stream(params.seed, Domain::Tube, &[], trial);
    distance_with_cutoff(&params, path, &mut rng, f64::INFINITY)
}

/// Estimates `P(∫ |xi_n - f| dt < eps)`.
pub fn tube_probability(params: &ModelParams, path: &PiecewiseLinearPath, eps: f64, trials: u64) -> Result<McEstimate> {
    params.validate()?;
    if !(eps > 0.0) {
        return Err(invalid("eps", format!("must be > 0, got {eps}")));
    }
    if trials == 0 {
        return Err(invalid("trials", "must be >= 1"));
    }
    let params = params.with_bridge_correction(false);
    let hits = (0..trials)
        .into_par_iter()
        .filter(|&i| {
            let mut rng = stream(params.seed, Domain::Tube, &[], i);
            distance_with_cutoff(&params, path, &mut rng, eps) < eps
        })
        .count() as u64;
    let p_hat = hits as f64 / trials as f64;
    let (lo, hi) = wilson_interval(hits, trials, Z95);
    Ok(McEstimate {
        lambda: params.lambda,
        n: params.n,
        x: eps,
        estimator: EstimatorKind::Crude,
        trials: Trials::Crude { trials, hits },
        p_hat,
        ci_low: lo.min(p_hat),
        ci_high: hi.max(p_hat),
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
    fn abs_integral_cases() {
        assert_eq!(abs_linear_integral(1.0, 3.0, 2.0), 4.0);
        assert_eq!(abs_linear_integral(-1.0, -3.0, 2.0), 4.0);
        // crosses zero at the midpoint: two triangles of area 1/4
        assert_eq!(abs_linear_integral(-1.0, 1.0, 1.0), 0.5);
    }

    #[test]
    fn cursor_handles_path_breakpoints() {
        let f = PiecewiseLinearPath::continuous(vec![0.0, 0.5, 1.0], vec![0.0, 1.0, 0.0]).unwrap();
        let mut c = PathCursor::new(&f);
        assert_eq!(c.span(0.0, 0.25), (0.0, 0.5));
        assert_eq!(c.span(0.25, 0.5), (0.5, 1.0));
        assert_eq!(c.span(0.5, 0.75), (1.0, 0.5));
        assert_eq!(c.span(0.75, 1.0), (0.5, 0.0));
    }

    #[test]
    fn wide_tube_is_certain() {
        let params = ModelParams::new(1.0, 4).with_grid_points(128).with_seed(1);
        let e = tube_probability(&params, &PiecewiseLinearPath::zero(), 10.0, 2000).unwrap();
        assert!(e.p_hat >= 0.99);
    }

    #[test]
    fn distance_of_reset_free_zero_n_large() {
        let params = ModelParams::reset_free(10_000).with_grid_points(256);
        let d = tube_distance(&params, &PiecewiseLinearPath::linear(0.5), 0);
        assert!((d - 0.25).abs() < 0.05, "{d}");
    }

    #[test]
    fn probability_nonincreasing_as_eps_shrinks() {
        let params = ModelParams::new(1.0, 4).with_grid_points(128).with_seed(3);
        let f = PiecewiseLinearPath::linear(0.5);
        let ps: Vec<f64> = [0.5, 0.4, 0.3, 0.2, 0.1]
            .iter()
            .map(|&eps| tube_probability(&params, &f, eps, 3000).unwrap().p_hat)
            .collect();
        assert!(ps.windows(2).all(|w| w[1] <= w[0]), "{ps:?}");
    }
}
