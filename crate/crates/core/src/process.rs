//! Exact event-driven simulation of the scaled reset process on `[0, 1]`.
//!
//! The scaled process is `xi_n(t) = w_n(t) - w_n(last reset before t)`, with
//! `w_n` a Brownian motion of variance `t / n` and resets arriving as a
//! Poisson process of rate `lambda * n`. Reset epochs are drawn exactly and
//! merged into the uniform diffusion grid; they are never snapped to it.

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Default resolution of the uniform diffusion grid.
pub const DEFAULT_GRID_POINTS: usize = 2048;

/// Parameters of one simulation run.
///
/// `lambda == 0` is accepted and means the reset clock never fires (the
/// reset-free reduction to plain Brownian motion).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Reset intensity per unit of unscaled time.
    pub lambda: f64,
    /// Scale parameter; the normalizing function is `psi(n) = n`.
    pub n: u32,
    /// Number of points of the uniform grid on `[0, 1]`, endpoints included.
    pub grid_points: usize,
    pub seed: u64,
    /// Sample each segment's maximum from the Brownian-bridge law.
    #[serde(default)]
    pub bridge_correction: bool,
}

impl ModelParams {
    pub fn new(lambda: f64, n: u32) -> Self {
        Self {
            lambda,
            n,
            grid_points: DEFAULT_GRID_POINTS,
            seed: 0,
            bridge_correction: false,
        }
    }

    /// Parameters with the reset clock switched off.
    pub fn reset_free(n: u32) -> Self {
        Self::new(0.0, n)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_grid_points(mut self, grid_points: usize) -> Self {
        self.grid_points = grid_points;
        self
    }

    pub fn with_bridge_correction(mut self, on: bool) -> Self {
        self.bridge_correction = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(invalid("lambda", format!("must be finite and >= 0, got {}", self.lambda)));
        }
        if self.n == 0 {
            return Err(invalid("n", "must be >= 1"));
        }
        if self.grid_points < 2 {
            return Err(invalid("grid_points", format!("must be >= 2, got {}", self.grid_points)));
        }
        Ok(())
    }

    /// Reset rate of the scaled clock on `[0, 1]`.
    pub fn scaled_rate(&self) -> f64 {
        self.lambda * f64::from(self.n)
    }

    pub fn grid_step(&self) -> f64 {
        1.0 / (self.grid_points - 1) as f64
    }

    pub(crate) fn grid_time(&self, index: usize) -> f64 {
        if index + 1 >= self.grid_points {
            1.0
        } else {
            index as f64 / (self.grid_points - 1) as f64
        }
    }
}

/// One realization of `xi_n` on the merged grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    /// Union of the uniform grid and the reset epochs, increasing.
    pub times: Vec<f64>,
    /// Right-continuous values of `xi_n`; exactly 0 at every reset epoch.
    pub xi_values: Vec<f64>,
    pub w_values: Vec<f64>,
    /// Scaled reset epochs in `(0, 1]`, strictly increasing.
    pub reset_times: Vec<f64>,
    /// Supremum of `|xi_n|`, left limits at resets included.
    pub sup_abs: f64,
}

impl TrajectorySample {
    /// Builds a sample from stored values, taking `sup_abs` as the maximum of
    /// `|xi|` over the stored points and the left limits at resets.
    pub fn from_values(
        times: Vec<f64>,
        xi_values: Vec<f64>,
        w_values: Vec<f64>,
        reset_times: Vec<f64>,
    ) -> Self {
        let mut sample = Self {
            times,
            xi_values,
            w_values,
            reset_times,
            sup_abs: 0.0,
        };
        let point_max = sample.xi_values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let jump_max = sample
            .reset_jumps()
            .iter()
            .fold(0.0_f64, |m, &(_, left)| m.max(left.abs()));
        sample.sup_abs = point_max.max(jump_max);
        sample
    }

    pub fn reset_count(&self) -> usize {
        self.reset_times.len()
    }

    /// `(reset time, left limit of xi_n there)` for every reset.
    pub fn reset_jumps(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(self.reset_times.len());
        let mut anchor = 0.0;
        let mut next = 0;
        for (&t, &w) in self.times.iter().zip(&self.w_values) {
            if next < self.reset_times.len() && t == self.reset_times[next] {
                out.push((t, w - anchor));
                anchor = w;
                next += 1;
            }
        }
        out
    }
}

/// Draws the scaled reset epochs `t_k / n` that fall in `(0, 1]`.
///
/// Inter-arrival times are exponential with rate `lambda * n`, so the count
/// is Poisson(`lambda * n`).
pub fn simulate_reset_epochs<R: Rng + ?Sized>(params: &ModelParams, rng: &mut R) -> Vec<f64> {
    let rate = params.scaled_rate();
    let mut epochs = Vec::new();
    if rate <= 0.0 {
        return epochs;
    }
    let mut t = 0.0;
    loop {
        let gap: f64 = rng.sample(Exp1);
        t += gap / rate;
        if t > 1.0 {
            break;
        }
        epochs.push(t);
    }
    epochs
}

/// Simulates one trajectory: reset epochs first, then Brownian increments
/// along the merged grid.
pub fn simulate_trajectory<R: Rng + ?Sized>(params: &ModelParams, rng: &mut R) -> TrajectorySample {
    let epochs = simulate_reset_epochs(params, rng);
    let capacity = params.grid_points + epochs.len();
    let mut times = Vec::with_capacity(capacity);
    let mut xi_values = Vec::with_capacity(capacity);
    let mut w_values = Vec::with_capacity(capacity);
    times.push(0.0);
    xi_values.push(0.0);
    w_values.push(0.0);

    let mut walker = Walker::scheduled(params, &epochs);
    while let Some(seg) = walker.step(rng) {
        times.push(seg.t1);
        xi_values.push(if seg.reset { 0.0 } else { seg.end_left });
        w_values.push(seg.w_end);
    }
    let sup_abs = walker.state().running_sup;
    TrajectorySample {
        times,
        xi_values,
        w_values,
        reset_times: epochs,
        sup_abs,
    }
}

/// Supremum statistic recorded on a sample.
pub fn sup_abs_of(sample: &TrajectorySample) -> f64 {
    sample.sup_abs
}

/// Full restartable state of the process at some time.
///
/// Both the reset clock and the Brownian increments are memoryless, so a
/// trajectory continued from a copy of this state is an exact sample of the
/// conditional future.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProcessState {
    pub t: f64,
    /// Index of the last grid point at or before `t`.
    pub grid_index: usize,
    pub xi: f64,
    pub w: f64,
    /// Value of `w_n` at the most recent reset (0 before the first).
    pub anchor: f64,
    pub running_sup: f64,
    pub resets: u32,
}

impl ProcessState {
    pub fn origin() -> Self {
        Self {
            t: 0.0,
            grid_index: 0,
            xi: 0.0,
            w: 0.0,
            anchor: 0.0,
            running_sup: 0.0,
            resets: 0,
        }
    }
}

/// One step of the walker: the process between two consecutive merged-grid
/// times, during which no reset occurs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub t0: f64,
    pub t1: f64,
    /// `xi_n(t0)`, right-continuous.
    pub start: f64,
    /// `xi_n(t1-)`.
    pub end_left: f64,
    pub w_end: f64,
    /// A reset fires at `t1`.
    pub reset: bool,
    /// Maximum of `|xi_n|` over `[t0, t1)` including the left limit.
    pub max_abs: f64,
}

#[derive(Debug, Clone)]
enum Clock<'a> {
    Lazy,
    Scheduled { epochs: &'a [f64], next: usize },
}

/// Advances the process segment by segment.
#[derive(Debug, Clone)]
pub struct Walker<'a> {
    params: ModelParams,
    state: ProcessState,
    next_reset: f64,
    clock: Clock<'a>,
    sd_scale: f64,
}

impl Walker<'static> {
    /// Walker drawing reset epochs on the fly, starting from `state`.
    ///
    /// The residual time to the next reset is drawn fresh, which is exact by
    /// memorylessness of the exponential clock.
    pub fn lazy<R: Rng + ?Sized>(params: &ModelParams, state: ProcessState, rng: &mut R) -> Self {
        let mut walker = Self {
            params: *params,
            state,
            next_reset: f64::INFINITY,
            clock: Clock::Lazy,
            sd_scale: 1.0 / f64::from(params.n),
        };
        walker.next_reset = walker.draw_next_reset(state.t, rng);
        walker
    }
}

impl<'a> Walker<'a> {
    /// Walker following a pre-drawn list of epochs from the origin.
    pub fn scheduled(params: &ModelParams, epochs: &'a [f64]) -> Self {
        Self {
            params: *params,
            state: ProcessState::origin(),
            next_reset: epochs.first().copied().unwrap_or(f64::INFINITY),
            clock: Clock::Scheduled { epochs, next: 0 },
            sd_scale: 1.0 / f64::from(params.n),
        }
    }

    pub fn state(&self) -> &ProcessState {
        &self.state
    }

    pub fn finished(&self) -> bool {
        self.state.grid_index + 1 >= self.params.grid_points
    }

    fn draw_next_reset<R: Rng + ?Sized>(&self, from: f64, rng: &mut R) -> f64 {
        let rate = self.params.scaled_rate();
        if rate <= 0.0 {
            return f64::INFINITY;
        }
        let gap: f64 = rng.sample(Exp1);
        from + gap / rate
    }

    /// Advances to the next merged-grid time; `None` once `t = 1`.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Option<Segment> {
        if self.finished() {
            return None;
        }
        let grid_next = self.params.grid_time(self.state.grid_index + 1);
        let reset = self.next_reset <= grid_next;
        let t1 = if reset { self.next_reset } else { grid_next };
        let t0 = self.state.t;
        let dt = t1 - t0;
        let variance = dt * self.sd_scale;
        let z: f64 = rng.sample(StandardNormal);
        let w_end = self.state.w + variance.sqrt() * z;
        let start = self.state.xi;
        let end_left = w_end - self.state.anchor;

        let mut max_abs = start.abs().max(end_left.abs());
        if self.params.bridge_correction && variance > 0.0 {
            let floor = self.state.running_sup.max(max_abs);
            max_abs = max_abs.max(bridge_excursion_above(start, end_left, variance, floor, rng));
        }

        if !reset || t1 == grid_next {
            self.state.grid_index += 1;
        }
        self.state.t = t1;
        self.state.w = w_end;
        self.state.running_sup = self.state.running_sup.max(max_abs);
        if reset {
            self.state.anchor = w_end;
            self.state.xi = 0.0;
            self.state.resets += 1;
            self.next_reset = match &mut self.clock {
                Clock::Lazy => self.draw_next_reset(t1, rng),
                Clock::Scheduled { epochs, next } => {
                    *next += 1;
                    epochs.get(*next).copied().unwrap_or(f64::INFINITY)
                }
            };
        } else {
            self.state.xi = end_left;
        }

        Some(Segment {
            t0,
            t1,
            start,
            end_left,
            w_end,
            reset,
            max_abs,
        })
    }

    /// Runs until the running supremum reaches `level` (returns `true`, the
    /// walker stopped at the end of the crossing segment) or until `t = 1`.
    pub fn run_until_level<R: Rng + ?Sized>(&mut self, level: f64, rng: &mut R) -> bool {
        if self.state.running_sup >= level {
            return true;
        }
        while self.step(rng).is_some() {
            if self.state.running_sup >= level {
                return true;
            }
        }
        false
    }
}

/// Samples `max |B|` of a Brownian bridge from `a` to `b` with total
/// variance `variance`, using the exact law of the bridge maximum and of the
/// bridge minimum.
///
/// The maximum and minimum are drawn from independent uniforms; the joint
/// correction only matters when one segment nearly touches both `+x` and
/// `-x`, which needs `2x` within a few grid standard deviations.
pub fn bridge_max_abs<R: Rng + ?Sized>(a: f64, b: f64, variance: f64, rng: &mut R) -> f64 {
    let u_hi = 1.0 - rng.random::<f64>();
    let u_lo = 1.0 - rng.random::<f64>();
    let d2 = (b - a) * (b - a);
    let hi = 0.5 * (a + b + (d2 - 2.0 * variance * u_hi.ln()).sqrt());
    let lo = 0.5 * (a + b - (d2 - 2.0 * variance * u_lo.ln()).sqrt());
    hi.max(-lo)
}

/// Log-probability below which a bridge excursion is not sampled.
const NEGLIGIBLE_LOG_PROB: f64 = -37.0;

/// Like [`bridge_max_abs`], but only samples a side of the bridge when the
/// probability that it exceeds `floor` (with `floor >= max(|a|, |b|)`) is
/// above `e^-37`; returns a value `<= floor` otherwise.
///
/// The running supremum can only change through such an exceedance, so
/// skipping negligible sides leaves its law unchanged up to `1e-16` per
/// segment.
pub fn bridge_excursion_above<R: Rng + ?Sized>(a: f64, b: f64, variance: f64, floor: f64, rng: &mut R) -> f64 {
    let d2 = (b - a) * (b - a);
    let mut out = 0.0_f64;
    // P(max >= c) = exp(-2 (c - a)(c - b) / variance)
    if -2.0 * (floor - a) * (floor - b) / variance > NEGLIGIBLE_LOG_PROB {
        let u = 1.0 - rng.random::<f64>();
        out = out.max(0.5 * (a + b + (d2 - 2.0 * variance * u.ln()).sqrt()));
    }
    if -2.0 * (floor + a) * (floor + b) / variance > NEGLIGIBLE_LOG_PROB {
        let u = 1.0 - rng.random::<f64>();
        out = out.max(-0.5 * (a + b - (d2 - 2.0 * variance * u.ln()).sqrt()));
    }
    out
}
