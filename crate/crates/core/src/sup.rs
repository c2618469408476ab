//! Rate function of the supremum `sup |xi_n|` and its optimal paths.
//!
//! Reaching level `x` is cheapest by staying at 0 until a release time `s`
//! and then ramping linearly to `x` at `t = 1`; this reduces the path-space
//! problem to minimizing `lambda (1 - s) + x^2 / (2 (1 - s))` over `s`.
//! [`variational_minimize`] recovers the same value by direct search over
//! discretized paths.

use rand::{Rng, RngCore};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::path::PiecewiseLinearPath;
use crate::rate::{nonzero_measure, rate_reset};
use crate::rng::{stream, Domain};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    Negative,
    Linear,
    Quadratic,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::Negative => "Negative",
            Regime::Linear => "Linear",
            Regime::Quadratic => "Quadratic",
        }
    }
}

/// Rate of the level `x` together with the optimal release time and slope.
///
/// For the `Negative` regime `s_star` and `k_star` are NaN.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupRatePoint {
    pub x: f64,
    pub rate: f64,
    pub s_star: f64,
    pub k_star: f64,
    pub regime: Regime,
}

/// Level at which the optimal path stops having a flat start.
pub fn junction(lambda: f64) -> f64 {
    (2.0 * lambda).sqrt()
}

/// Linear branch `sqrt(2 lambda) x`.
pub fn linear_branch(x: f64, lambda: f64) -> f64 {
    junction(lambda) * x
}

/// Quadratic branch `lambda + x^2 / 2`.
pub fn quadratic_branch(x: f64, lambda: f64) -> f64 {
    lambda + 0.5 * x * x
}

/// Cost of releasing at time `s` and ramping to `x` by `t = 1`.
pub fn reduced_objective(s: f64, x: f64, lambda: f64) -> f64 {
    let u = 1.0 - s;
    if u <= 0.0 {
        return if x == 0.0 { 0.0 } else { f64::INFINITY };
    }
    lambda * u + x * x / (2.0 * u)
}

/// Derivative of the rate in `x` (right derivative at the junction).
pub fn sup_rate_slope(x: f64, lambda: f64) -> f64 {
    if x < 0.0 {
        f64::NAN
    } else if x <= junction(lambda) {
        junction(lambda)
    } else {
        x
    }
}

/// Closed-form supremum rate.
pub fn sup_rate(x: f64, lambda: f64) -> SupRatePoint {
    if x < 0.0 || x.is_nan() {
        return SupRatePoint {
            x,
            rate: f64::INFINITY,
            s_star: f64::NAN,
            k_star: f64::NAN,
            regime: Regime::Negative,
        };
    }
    let j = junction(lambda);
    // stationary point of the reduced objective: 1 - s = x / sqrt(2 lambda)
    if x <= j {
        SupRatePoint {
            x,
            rate: linear_branch(x, lambda),
            s_star: 1.0 - x / j,
            k_star: j,
            regime: Regime::Linear,
        }
    } else {
        SupRatePoint {
            x,
            rate: quadratic_branch(x, lambda),
            s_star: 0.0,
            k_star: x,
            regime: Regime::Quadratic,
        }
    }
}

/// The flat-then-ramp path attaining `sup_rate(x, lambda)`.
///
/// The positive ramp is returned; its negative has the same rate.
pub fn optimal_path(x: f64, lambda: f64) -> Result<PiecewiseLinearPath> {
    if !(x >= 0.0 && x.is_finite()) {
        return Err(invalid("x", format!("level must be finite and >= 0, got {x}")));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(invalid("lambda", format!("must be > 0, got {lambda}")));
    }
    if x == 0.0 {
        return Ok(PiecewiseLinearPath::zero());
    }
    let p = sup_rate(x, lambda);
    match p.regime {
        Regime::Quadratic => Ok(PiecewiseLinearPath::linear(x)),
        _ if p.s_star <= 0.0 => Ok(PiecewiseLinearPath::linear(x)),
        _ => PiecewiseLinearPath::continuous(vec![0.0, p.s_star, 1.0], vec![0.0, 0.0, x]),
    }
}

/// Best path found by [`variational_minimize`].
#[derive(Debug, Clone, PartialEq)]
pub struct VariationalResult {
    pub best_path: PiecewiseLinearPath,
    pub best_rate: f64,
    /// Rate reached by each restart, in restart order.
    pub restart_rates: Vec<f64>,
}

/// Minimizes the reset rate over continuous piecewise-linear paths on a
/// uniform grid of `segments` pieces subject to `max |f| >= x`.
///
/// Each restart starts from a random nonnegative configuration and runs a
/// local descent: coordinate sweeps choosing, per breakpoint, between zero
/// and the analytic minimizer of its local quadratic, then moves on the
/// active set (pin or release one breakpoint at zero, shift the constrained
/// peak by one node) with exact block relaxation of the free values after
/// each move. Restarts run in parallel on independent streams keyed by a
/// seed drawn from `rng`.
pub fn variational_minimize<R: RngCore + ?Sized>(
    x: f64,
    lambda: f64,
    segments: usize,
    restarts: usize,
    rng: &mut R,
) -> Result<VariationalResult> {
    if segments < 2 {
        return Err(invalid("segments", format!("must be >= 2, got {segments}")));
    }
    if restarts < 1 {
        return Err(invalid("restarts", "must be >= 1"));
    }
    if !(x >= 0.0 && x.is_finite()) {
        return Err(invalid("x", format!("level must be finite and >= 0, got {x}")));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(invalid("lambda", format!("must be > 0, got {lambda}")));
    }
    if x == 0.0 {
        return Ok(VariationalResult {
            best_path: PiecewiseLinearPath::zero(),
            best_rate: 0.0,
            restart_rates: vec![0.0; restarts],
        });
    }

    let base: u64 = rng.next_u64();
    let problem = Discrete {
        m: segments,
        h: 1.0 / segments as f64,
        lambda,
        x,
    };
    let runs: Vec<(Vec<f64>, f64, f64)> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream(base, Domain::Variational, &[], r as u64);
            let values = problem.descend(&mut rng);
            let path = PiecewiseLinearPath::uniform(values.clone()).expect("uniform grid");
            let rate = rate_reset(&path, lambda).value;
            let measure = nonzero_measure(&path);
            (values, rate, measure)
        })
        .collect();

    let restart_rates = runs.iter().map(|r| r.1).collect();
    let best = runs
        .into_iter()
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.2.total_cmp(&b.2)))
        .expect("at least one restart");
    Ok(VariationalResult {
        best_path: PiecewiseLinearPath::uniform(best.0).expect("uniform grid"),
        best_rate: best.1,
        restart_rates,
    })
}

struct Discrete {
    m: usize,
    h: f64,
    lambda: f64,
    x: f64,
}

#[derive(Clone)]
struct ActiveSet {
    pinned: Vec<bool>,
    peak: usize,
}

impl Discrete {
    fn segment_cost(&self, a: f64, b: f64) -> f64 {
        if a == 0.0 && b == 0.0 {
            0.0
        } else {
            let d = b - a;
            self.lambda * self.h + d * d / (2.0 * self.h)
        }
    }

    /// (rate, nonzero measure) of grid values.
    fn objective(&self, v: &[f64]) -> (f64, f64) {
        v.windows(2).fold((0.0, 0.0), |(r, m), w| {
            let c = self.segment_cost(w[0], w[1]);
            (r + c, if c > 0.0 { m + self.h } else { m })
        })
    }

    fn better(&self, a: (f64, f64), b: (f64, f64)) -> bool {
        const TOL: f64 = 1e-14;
        a.0 < b.0 - TOL * b.0.abs().max(1.0) || ((a.0 - b.0).abs() <= TOL * b.0.abs().max(1.0) && a.1 < b.1)
    }

    fn descend<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        let m = self.m;
        let peak = rng.random_range(1..=m);
        let prefix = rng.random_range(0..peak);
        let mut v: Vec<f64> = (0..=m)
            .map(|i| if i <= prefix { 0.0 } else { 2.0 * self.x * rng.random::<f64>() })
            .collect();
        v[peak] = v[peak].max(self.x);

        for _ in 0..3 {
            self.coordinate_sweep(&mut v, peak);
        }
        let mut active = ActiveSet {
            pinned: v.iter().enumerate().map(|(i, &y)| i == 0 || (i != peak && y == 0.0)).collect(),
            peak,
        };
        let mut values = self.relax(&active);
        let mut score = self.objective(&values);

        loop {
            let mut best: Option<(ActiveSet, Vec<f64>, (f64, f64))> = None;
            for cand in self.neighbours(&active) {
                let vals = self.relax(&cand);
                let s = self.objective(&vals);
                let incumbent = best.as_ref().map_or(score, |b| b.2);
                if self.better(s, incumbent) {
                    best = Some((cand, vals, s));
                }
            }
            match best {
                Some((a, vals, s)) => {
                    active = a;
                    values = vals;
                    score = s;
                }
                None => break,
            }
        }
        values
    }

    /// One Gauss-Seidel pass: each breakpoint moves to the better of 0 and
    /// its local quadratic minimizer (projected onto `>= x` at the peak).
    fn coordinate_sweep(&self, v: &mut [f64], peak: usize) {
        let m = self.m;
        for i in 1..=m {
            let local = |y: f64, v: &[f64]| {
                let left = self.segment_cost(v[i - 1], y);
                let right = if i < m { self.segment_cost(y, v[i + 1]) } else { 0.0 };
                left + right
            };
            let mut c = if i < m { 0.5 * (v[i - 1] + v[i + 1]) } else { v[m - 1] };
            if i == peak {
                c = c.max(self.x);
                v[i] = c;
                continue;
            }
            v[i] = if local(0.0, v) <= local(c, v) { 0.0 } else { c };
        }
    }

    /// Exact minimizer of the kinetic energy given the active set: linear
    /// interpolation between fixed nodes, constant after the last one.
    fn relax(&self, active: &ActiveSet) -> Vec<f64> {
        let m = self.m;
        let mut v = vec![0.0; m + 1];
        v[active.peak] = self.x;
        let fixed: Vec<usize> = (0..=m).filter(|&i| active.pinned[i] || i == active.peak).collect();
        for w in fixed.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (va, vb) = (v[a], v[b]);
            for (k, slot) in v.iter_mut().enumerate().take(b).skip(a + 1) {
                *slot = va + (vb - va) * ((k - a) as f64 / (b - a) as f64);
            }
        }
        let last = *fixed.last().unwrap();
        let tail = v[last];
        for slot in v.iter_mut().skip(last + 1) {
            *slot = tail;
        }
        v
    }

    fn neighbours(&self, active: &ActiveSet) -> Vec<ActiveSet> {
        let m = self.m;
        let mut out = Vec::with_capacity(m + 2);
        for i in 1..=m {
            if i == active.peak {
                continue;
            }
            let mut a = active.clone();
            a.pinned[i] = !a.pinned[i];
            out.push(a);
        }
        for np in [active.peak.wrapping_sub(1), active.peak + 1] {
            if (1..=m).contains(&np) {
                let mut a = active.clone();
                a.pinned[np] = false;
                a.peak = np;
                out.push(a);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;

    /// Grid search of the reduced objective over `s`.
    fn grid_reduction(x: f64, lambda: f64, points: usize) -> (f64, f64) {
        (0..points)
            .map(|i| i as f64 / points as f64)
            .map(|s| (s, reduced_objective(s, x, lambda)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap()
    }

    #[test]
    fn closed_form_values() {
        assert_eq!(sup_rate(0.0, 3.0).rate, 0.0);
        let p = sup_rate(2.0, 1.0);
        assert_eq!((p.rate, p.s_star, p.k_star, p.regime), (3.0, 0.0, 2.0, Regime::Quadratic));
        let j = sup_rate(2f64.sqrt(), 1.0);
        assert_relative_eq!(j.rate, 2.0, max_relative = 1e-15);
        assert_relative_eq!(quadratic_branch(2f64.sqrt(), 1.0), 2.0, max_relative = 1e-15);
        let n = sup_rate(-0.1, 1.0);
        assert_eq!(n.regime, Regime::Negative);
        assert!(n.rate.is_infinite());
    }

    #[test]
    fn reduction_grid_matches_calculus() {
        let (s, v) = grid_reduction(1.0, 1.0, 1_000_000);
        let p = sup_rate(1.0, 1.0);
        assert_relative_eq!(p.rate, 2f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(p.s_star, 0.292_893_2, max_relative = 1e-7);
        assert!((s - p.s_star).abs() <= 1e-6);
        assert_relative_eq!(v, p.rate, max_relative = 1e-10);
        for &(x, lambda) in &[(0.3, 2.0), (2.5, 0.5), (1.9, 1.0)] {
            let (s, v) = grid_reduction(x, lambda, 200_000);
            let p = sup_rate(x, lambda);
            assert!((s - p.s_star).abs() <= 1.0 / 200_000.0 + 1e-12);
            assert_relative_eq!(v, p.rate, max_relative = 1e-8);
        }
    }

    #[test]
    fn optimal_paths() {
        assert_eq!(optimal_path(0.0, 1.0).unwrap(), PiecewiseLinearPath::zero());
        let p = optimal_path(2.0, 1.0).unwrap();
        assert_eq!(p.values(), &[0.0, 2.0]);
        assert_eq!(rate_reset(&p, 1.0).value, 3.0);
        let q = optimal_path(1.0, 1.0).unwrap();
        assert_relative_eq!(q.breakpoints()[1], 1.0 - 0.5f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(rate_reset(&q, 1.0).value, 2f64.sqrt(), max_relative = 1e-14);
        assert!(optimal_path(-1.0, 1.0).is_err());
        for lambda in [0.5, 1.0, 2.0] {
            let j = junction(lambda);
            let p = optimal_path(j, lambda).unwrap();
            assert_relative_eq!(rate_reset(&p, lambda).value, 2.0 * lambda, max_relative = 1e-12);
        }
    }

    #[test]
    fn variational_rejects_bad_input() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        assert!(variational_minimize(1.0, 1.0, 1, 2, &mut rng).is_err());
        assert!(variational_minimize(-1.0, 1.0, 8, 2, &mut rng).is_err());
    }

    #[test]
    fn variational_zero_level() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let r = variational_minimize(0.0, 1.0, 16, 2, &mut rng).unwrap();
        assert_eq!(r.best_rate, 0.0);
        assert_eq!(r.best_path, PiecewiseLinearPath::zero());
    }

    /// Brute force over the flat-then-ramp grid family.
    fn snapped_optimum(x: f64, lambda: f64, m: usize) -> f64 {
        (0..m)
            .map(|k| {
                let bp: Vec<f64> = (0..=m).map(|i| i as f64 / m as f64).collect();
                let vals: Vec<f64> = (0..=m)
                    .map(|i| if i <= k { 0.0 } else { x * (i - k) as f64 / (m - k) as f64 })
                    .collect();
                rate_reset(&PiecewiseLinearPath::continuous(bp, vals).unwrap(), lambda).value
            })
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn variational_matches_snapped_family() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for &x in &[0.5, 1.0, 2.0] {
            let r = variational_minimize(x, 1.0, 32, 4, &mut rng).unwrap();
            let snapped = snapped_optimum(x, 1.0, 32);
            assert_relative_eq!(r.best_rate, snapped, max_relative = 1e-12);
            assert!(r.best_rate >= sup_rate(x, 1.0).rate - 1e-9);
            assert!(r.best_path.sup_abs() >= x - 1e-12);
        }
    }

    #[test]
    fn convex_and_monotone() {
        for &lambda in &[0.5, 1.0, 2.0] {
            let h = 1e-3;
            let r: Vec<f64> = (0..4000).map(|i| sup_rate(i as f64 * h, lambda).rate).collect();
            for w in r.windows(3) {
                assert!(w[1] >= w[0]);
                assert!(w[2] - 2.0 * w[1] + w[0] >= -1e-10);
            }
        }
    }

    #[test]
    fn open_set_infimum_by_continuity() {
        // levels strictly above x approach the closed-set value
        for &x in &[0.5, 1.0, 2.0] {
            let base = sup_rate(x, 1.0).rate;
            let mut prev = f64::INFINITY;
            for k in 1..12 {
                let d = 10f64.powi(-k);
                let gap = sup_rate(x + d, 1.0).rate - base;
                assert!(gap > 0.0 && gap < prev);
                assert!(gap <= 2.5 * d);
                prev = gap;
            }
        }
    }
}
