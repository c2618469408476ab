//! Closed-form rate functionals on piecewise-linear paths.
//!
//! * [`rate_reset`]: the reset-process rate `lambda * |M| + 1/2 ∫_M f'^2`,
//!   with `M` the set where the path is nonzero, finite on paths that start
//!   at 0 and only ever jump to 0.
//! * [`rate_wiener`]: the Brownian action `1/2 ∫ f'^2` on continuous paths.
//! * [`rate_poisson`]: the Poisson-clock rate `∫ (s ln(s/lambda) - s + lambda)`
//!   on nondecreasing continuous paths.
//!
//! Zero detection is exact on stored values; callers wanting "numerically
//! zero" must snap values themselves.

use serde::{Deserialize, Serialize, Serializer};

use crate::path::PiecewiseLinearPath;

/// Admissibility condition that a path fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    NonzeroStart,
    JumpToNonzero,
    DecreasingPoisson,
    NotAdmissible,
}

/// A rate value with its decomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateResult {
    pub finite: bool,
    pub value: f64,
    pub reset_term: f64,
    pub kinetic_term: f64,
    pub violation: Option<Violation>,
}

impl RateResult {
    pub fn finite(reset_term: f64, kinetic_term: f64) -> Self {
        Self {
            finite: true,
            value: reset_term + kinetic_term,
            reset_term,
            kinetic_term,
            violation: None,
        }
    }

    pub fn infinite(violation: Violation) -> Self {
        Self {
            finite: false,
            value: f64::INFINITY,
            reset_term: 0.0,
            kinetic_term: 0.0,
            violation: Some(violation),
        }
    }
}

// Infinite values are written as `null` alongside `"finite": false`.
impl Serialize for RateResult {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire {
            finite: bool,
            value: Option<f64>,
            reset_term: f64,
            kinetic_term: f64,
            violation: Option<Violation>,
        }
        Wire {
            finite: self.finite,
            value: self.finite.then_some(self.value),
            reset_term: self.reset_term,
            kinetic_term: self.kinetic_term,
            violation: self.violation,
        }
        .serialize(serializer)
    }
}

/// Membership in the finite-rate class of the reset process.
pub fn classify_tilde_ac0(path: &PiecewiseLinearPath) -> Result<(), Violation> {
    if path.values()[0] != 0.0 {
        return Err(Violation::NonzeroStart);
    }
    if path.discontinuities().iter().any(|&(_, _, right)| right != 0.0) {
        return Err(Violation::JumpToNonzero);
    }
    Ok(())
}

/// Lebesgue measure of `{t : f(t) != 0}`.
///
/// A linear piece that is not identically zero vanishes at most at one
/// point, so it contributes its full length.
pub fn nonzero_measure(path: &PiecewiseLinearPath) -> f64 {
    path.pieces()
        .iter()
        .filter(|p| !p.is_zero())
        .map(|p| p.len())
        .sum()
}

fn kinetic(path: &PiecewiseLinearPath) -> f64 {
    0.5 * path
        .pieces()
        .iter()
        .filter(|p| !p.is_zero())
        .map(|p| {
            let d = p.end - p.start;
            d * d / p.len()
        })
        .sum::<f64>()
}

/// Rate of the reset process.
pub fn rate_reset(path: &PiecewiseLinearPath, lambda: f64) -> RateResult {
    match classify_tilde_ac0(path) {
        Err(v) => RateResult::infinite(v),
        Ok(()) => RateResult::finite(lambda * nonzero_measure(path), kinetic(path)),
    }
}

/// Rate of the scaled Brownian motion.
pub fn rate_wiener(path: &PiecewiseLinearPath) -> RateResult {
    if path.values()[0] != 0.0 || path.has_jump() {
        return RateResult::infinite(Violation::NotAdmissible);
    }
    RateResult::finite(0.0, kinetic(path))
}

/// Rate of the scaled Poisson counting process.
pub fn rate_poisson(path: &PiecewiseLinearPath, lambda: f64) -> RateResult {
    if path.values()[0] != 0.0 || path.has_jump() {
        return RateResult::infinite(Violation::DecreasingPoisson);
    }
    let pieces = path.pieces();
    if pieces.iter().any(|p| p.slope() < 0.0) {
        return RateResult::infinite(Violation::DecreasingPoisson);
    }
    let value = pieces
        .iter()
        .map(|p| {
            let s = p.slope();
            // s ln s -> 0 as s -> 0
            let integrand = if s == 0.0 {
                lambda
            } else {
                s * (s / lambda).ln() - s + lambda
            };
            integrand * p.len()
        })
        .sum::<f64>();
    RateResult::finite(0.0, value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zero_path() {
        let z = PiecewiseLinearPath::zero();
        assert_eq!(classify_tilde_ac0(&z), Ok(()));
        assert_eq!(nonzero_measure(&z), 0.0);
        assert_eq!(rate_reset(&z, 1.0).value, 0.0);
        assert_eq!(rate_wiener(&z).value, 0.0);
    }

    #[test]
    fn ramp() {
        let f = PiecewiseLinearPath::linear(1.0);
        assert_eq!(classify_tilde_ac0(&f), Ok(()));
        assert_eq!(nonzero_measure(&f), 1.0);
        let r = rate_reset(&f, 1.0);
        assert_eq!((r.reset_term, r.kinetic_term, r.value), (1.0, 0.5, 1.5));
        assert_eq!(rate_wiener(&PiecewiseLinearPath::linear(2.0)).value, 2.0);
    }

    #[test]
    fn jump_to_nonzero() {
        let p = PiecewiseLinearPath::with_left_limits(
            vec![0.0, 0.5, 1.0],
            vec![0.0, 0.1, 0.2],
            vec![true],
            vec![0.5],
        )
        .unwrap();
        assert_eq!(classify_tilde_ac0(&p), Err(Violation::JumpToNonzero));
        let r = rate_reset(&p, 1.0);
        assert!(!r.finite && r.value.is_infinite());
        assert_eq!(r.violation, Some(Violation::JumpToNonzero));
    }

    #[test]
    fn nonzero_start() {
        let p = PiecewiseLinearPath::continuous(vec![0.0, 1.0], vec![0.2, 0.2]).unwrap();
        assert_eq!(rate_reset(&p, 1.0).violation, Some(Violation::NonzeroStart));
    }

    #[test]
    fn flat_then_linear_measure() {
        let p = PiecewiseLinearPath::continuous(vec![0.0, 0.25, 1.0], vec![0.0, 0.0, 0.3]).unwrap();
        assert_eq!(nonzero_measure(&p), 0.75);
    }

    #[test]
    fn two_ramps_with_reset() {
        let p = PiecewiseLinearPath::with_left_limits(
            vec![0.0, 0.5, 1.0],
            vec![0.0, 0.0, 0.3],
            vec![true],
            vec![0.3],
        )
        .unwrap();
        let r = rate_reset(&p, 2.0);
        assert!(r.finite);
        assert_relative_eq!(r.value, 2.18, max_relative = 1e-14);
        assert_eq!(rate_wiener(&p).violation, Some(Violation::NotAdmissible));
    }

    #[test]
    fn poisson_rates() {
        assert_eq!(rate_poisson(&PiecewiseLinearPath::linear(1.5), 1.5).value, 0.0);
        let r = rate_poisson(&PiecewiseLinearPath::linear(2.0), 1.0);
        assert_relative_eq!(r.value, 2.0 * 2f64.ln() - 1.0, max_relative = 1e-15);
        assert_relative_eq!(r.value, 0.386294, max_relative = 1e-6);
        assert_eq!(
            rate_poisson(&PiecewiseLinearPath::linear(-1.0), 1.0).violation,
            Some(Violation::DecreasingPoisson)
        );
        // slope-0 pieces integrate to lambda
        assert_eq!(rate_poisson(&PiecewiseLinearPath::zero(), 0.7).value, 0.7);
    }

    #[test]
    fn rate_json_shape() {
        let inf = serde_json::to_value(RateResult::infinite(Violation::JumpToNonzero)).unwrap();
        assert_eq!(inf["finite"], false);
        assert!(inf["value"].is_null());
        assert_eq!(inf["violation"], "JumpToNonzero");
        let fin = serde_json::to_value(RateResult::finite(1.0, 0.5)).unwrap();
        assert_eq!(fin["value"], 1.5);
        assert!(fin["violation"].is_null());
    }
}
