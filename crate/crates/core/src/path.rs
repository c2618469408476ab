//! Piecewise-linear càdlàg test paths on `[0, 1]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A right-continuous piecewise-linear path with finitely many jumps.
///
/// Between consecutive breakpoints the path is a straight line. At an
/// interior breakpoint flagged as a jump the right value is `values[i]` and
/// the left limit is either given explicitly in `left_limits[i - 1]` or, when
/// `left_limits` is absent, obtained by continuing the previous segment's
/// slope (slope 0 before the first segment).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPath")]
pub struct PiecewiseLinearPath {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    jump_flags: Vec<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    left_limits: Option<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPath {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    #[serde(default)]
    jump_flags: Option<Vec<bool>>,
    #[serde(default)]
    left_limits: Option<Vec<f64>>,
}

impl TryFrom<RawPath> for PiecewiseLinearPath {
    type Error = Error;

    fn try_from(raw: RawPath) -> Result<Self> {
        let interior = raw.breakpoints.len().saturating_sub(2);
        let flags = raw.jump_flags.unwrap_or_else(|| vec![false; interior]);
        Self::build(raw.breakpoints, raw.values, flags, raw.left_limits)
    }
}

/// One linear piece `[t0, t1)` running from `start` to the left limit `end`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearPiece {
    pub t0: f64,
    pub t1: f64,
    pub start: f64,
    pub end: f64,
}

impl LinearPiece {
    pub fn len(&self) -> f64 {
        self.t1 - self.t0
    }

    pub fn slope(&self) -> f64 {
        (self.end - self.start) / self.len()
    }

    /// Identically zero on the piece (exact comparison).
    pub fn is_zero(&self) -> bool {
        self.start == 0.0 && self.end == 0.0
    }

    fn at(&self, t: f64) -> f64 {
        if t == self.t0 {
            self.start
        } else if t == self.t1 {
            self.end
        } else {
            self.start + (self.end - self.start) * ((t - self.t0) / self.len())
        }
    }
}

fn malformed(field: &'static str, reason: impl Into<String>) -> Error {
    Error::MalformedPath {
        field,
        reason: reason.into(),
    }
}

impl PiecewiseLinearPath {
    /// Path with explicit jump flags and slope-continuation left limits.
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>, jump_flags: Vec<bool>) -> Result<Self> {
        Self::build(breakpoints, values, jump_flags, None)
    }

    /// Path with explicit left limits at the flagged jumps.
    pub fn with_left_limits(
        breakpoints: Vec<f64>,
        values: Vec<f64>,
        jump_flags: Vec<bool>,
        left_limits: Vec<f64>,
    ) -> Result<Self> {
        Self::build(breakpoints, values, jump_flags, Some(left_limits))
    }

    /// Continuous path through the given points.
    pub fn continuous(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let interior = breakpoints.len().saturating_sub(2);
        Self::build(breakpoints, values, vec![false; interior], None)
    }

    fn build(
        breakpoints: Vec<f64>,
        values: Vec<f64>,
        jump_flags: Vec<bool>,
        left_limits: Option<Vec<f64>>,
    ) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(malformed("breakpoints", "need at least two breakpoints"));
        }
        if breakpoints[0] != 0.0 {
            return Err(malformed("breakpoints", "must start at 0"));
        }
        if *breakpoints.last().unwrap() != 1.0 {
            return Err(malformed("breakpoints", "must end at 1"));
        }
        if breakpoints.iter().any(|t| !t.is_finite()) {
            return Err(malformed("breakpoints", "must be finite"));
        }
        if !breakpoints.windows(2).all(|w| w[0] < w[1]) {
            return Err(malformed("breakpoints", "must be strictly increasing"));
        }
        if values.len() != breakpoints.len() {
            return Err(malformed(
                "values",
                format!("expected {} entries, got {}", breakpoints.len(), values.len()),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(malformed("values", "must be finite"));
        }
        let interior = breakpoints.len() - 2;
        if jump_flags.len() != interior {
            return Err(malformed(
                "jump_flags",
                format!("expected {interior} entries (one per interior breakpoint), got {}", jump_flags.len()),
            ));
        }
        if let Some(ll) = &left_limits {
            if ll.len() != interior {
                return Err(malformed(
                    "left_limits",
                    format!("expected {interior} entries, got {}", ll.len()),
                ));
            }
            if ll.iter().any(|v| !v.is_finite()) {
                return Err(malformed("left_limits", "must be finite"));
            }
        }
        Ok(Self {
            breakpoints,
            values,
            jump_flags,
            left_limits,
        })
    }

    pub fn zero() -> Self {
        Self::continuous(vec![0.0, 1.0], vec![0.0, 0.0]).expect("valid")
    }

    /// `f(t) = slope * t`.
    pub fn linear(slope: f64) -> Self {
        Self::continuous(vec![0.0, 1.0], vec![0.0, slope]).expect("valid")
    }

    /// Zero on `[0, s]`, then `slope * (t - s)` on `(s, 1]`.
    pub fn flat_then_ramp(s: f64, slope: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&s) {
            return Err(malformed("breakpoints", format!("release time {s} outside [0, 1]")));
        }
        if s >= 1.0 {
            Ok(Self::zero())
        } else if s == 0.0 {
            Ok(Self::linear(slope))
        } else {
            Self::continuous(vec![0.0, s, 1.0], vec![0.0, 0.0, slope * (1.0 - s)])
        }
    }

    /// Continuous path on the uniform grid `i / (values.len() - 1)`.
    pub fn uniform(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(malformed("values", "need at least two values"));
        }
        let m = values.len() - 1;
        let bps = (0..=m)
            .map(|i| if i == m { 1.0 } else { i as f64 / m as f64 })
            .collect();
        Self::continuous(bps, values)
    }

    /// Rebuilds a path from contiguous pieces covering `[0, 1]`.
    pub fn from_pieces(pieces: &[LinearPiece]) -> Result<Self> {
        if pieces.is_empty() {
            return Err(malformed("breakpoints", "no pieces"));
        }
        let mut bps = Vec::with_capacity(pieces.len() + 1);
        let mut values = Vec::with_capacity(pieces.len() + 1);
        let mut flags = Vec::with_capacity(pieces.len().saturating_sub(1));
        let mut lefts = Vec::with_capacity(pieces.len().saturating_sub(1));
        for (i, p) in pieces.iter().enumerate() {
            bps.push(p.t0);
            values.push(p.start);
            if i > 0 {
                let prev = &pieces[i - 1];
                if prev.t1 != p.t0 {
                    return Err(malformed("breakpoints", "pieces are not contiguous"));
                }
                flags.push(prev.end != p.start);
                lefts.push(prev.end);
            }
        }
        let last = pieces.last().unwrap();
        bps.push(last.t1);
        values.push(last.end);
        Self::build(bps, values, flags, Some(lefts))
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn jump_flags(&self) -> &[bool] {
        &self.jump_flags
    }

    pub fn left_limits(&self) -> Option<&[f64]> {
        self.left_limits.as_deref()
    }

    /// Linear pieces in time order.
    pub fn pieces(&self) -> Vec<LinearPiece> {
        let n = self.breakpoints.len();
        let mut out = Vec::with_capacity(n - 1);
        let mut prev_slope = 0.0;
        for i in 0..n - 1 {
            let (t0, t1) = (self.breakpoints[i], self.breakpoints[i + 1]);
            let start = self.values[i];
            let flagged = i + 1 < n - 1 && self.jump_flags[i];
            let end = if flagged {
                match &self.left_limits {
                    Some(ll) => ll[i],
                    None => start + prev_slope * (t1 - t0),
                }
            } else {
                self.values[i + 1]
            };
            let piece = LinearPiece { t0, t1, start, end };
            prev_slope = piece.slope();
            out.push(piece);
        }
        out
    }

    /// `(time, left limit, right value)` at every actual discontinuity.
    pub fn discontinuities(&self) -> Vec<(f64, f64, f64)> {
        let pieces = self.pieces();
        pieces
            .windows(2)
            .filter(|w| w[0].end != w[1].start)
            .map(|w| (w[1].t0, w[0].end, w[1].start))
            .collect()
    }

    pub fn has_jump(&self) -> bool {
        !self.discontinuities().is_empty()
    }

    /// Right-continuous value at `t` in `[0, 1]`.
    pub fn value_at(&self, t: f64) -> f64 {
        let pieces = self.pieces();
        let idx = pieces.partition_point(|p| p.t1 <= t).min(pieces.len() - 1);
        if t >= 1.0 {
            return pieces[pieces.len() - 1].end;
        }
        pieces[idx].at(t)
    }

    /// Supremum of `|f|` (left limits included).
    pub fn sup_abs(&self) -> f64 {
        self.pieces()
            .iter()
            .fold(0.0_f64, |m, p| m.max(p.start.abs()).max(p.end.abs()))
    }

    /// `c * f`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
            jump_flags: self.jump_flags.clone(),
            left_limits: Some(self.pieces()[..self.breakpoints.len() - 2]
                .iter()
                .map(|p| c * p.end)
                .collect()),
        }
    }

    /// The path equal to `self` on `[0, tau)` and to `other` on `[tau, 1]`.
    pub fn splice(&self, other: &Self, tau: f64) -> Result<Self> {
        if !(tau > 0.0 && tau < 1.0) {
            return Err(malformed("breakpoints", format!("splice point {tau} not in (0, 1)")));
        }
        let mut pieces = restrict(&self.pieces(), 0.0, tau);
        pieces.extend(restrict(&other.pieces(), tau, 1.0));
        Self::from_pieces(&pieces)
    }
}

fn restrict(pieces: &[LinearPiece], lo: f64, hi: f64) -> Vec<LinearPiece> {
    pieces
        .iter()
        .filter(|p| p.t1 > lo && p.t0 < hi)
        .map(|p| {
            let t0 = p.t0.max(lo);
            let t1 = p.t1.min(hi);
            LinearPiece {
                t0,
                t1,
                start: p.at(t0),
                end: p.at(t1),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_malformed() {
        assert!(matches!(
            PiecewiseLinearPath::new(vec![0.1, 1.0], vec![0.0, 0.0], vec![]),
            Err(Error::MalformedPath { field: "breakpoints", .. })
        ));
        assert!(matches!(
            PiecewiseLinearPath::new(vec![0.0, 0.5, 0.5, 1.0], vec![0.0; 4], vec![false; 2]),
            Err(Error::MalformedPath { field: "breakpoints", .. })
        ));
        assert!(matches!(
            PiecewiseLinearPath::new(vec![0.0, 1.0], vec![0.0], vec![]),
            Err(Error::MalformedPath { field: "values", .. })
        ));
        assert!(matches!(
            PiecewiseLinearPath::new(vec![0.0, 0.5, 1.0], vec![0.0; 3], vec![]),
            Err(Error::MalformedPath { field: "jump_flags", .. })
        ));
    }

    #[test]
    fn slope_continuation_left_limit() {
        // slope 0.6 on [0, 0.25], continued to 0.3 at t = 0.5, jump to 0
        let p = PiecewiseLinearPath::new(
            vec![0.0, 0.25, 0.5, 1.0],
            vec![0.0, 0.15, 0.0, 0.3],
            vec![false, true],
        )
        .unwrap();
        let d = p.discontinuities();
        assert_eq!(d.len(), 1);
        assert!((d[0].1 - 0.3).abs() < 1e-15);
        assert_eq!(d[0].2, 0.0);
    }

    #[test]
    fn json_roundtrip_and_schema_errors() {
        let p = PiecewiseLinearPath::with_left_limits(
            vec![0.0, 0.5, 1.0],
            vec![0.0, 0.0, 0.3],
            vec![true],
            vec![0.3],
        )
        .unwrap();
        let s = serde_json::to_string(&p).unwrap();
        let back: PiecewiseLinearPath = serde_json::from_str(&s).unwrap();
        assert_eq!(p, back);

        let bad = r#"{"breakpoints":[0,1],"values":[0]}"#;
        let err = serde_json::from_str::<PiecewiseLinearPath>(bad).unwrap_err();
        assert!(err.to_string().contains("values"), "{err}");
        let missing = r#"{"values":[0,0]}"#;
        let err = serde_json::from_str::<PiecewiseLinearPath>(missing).unwrap_err();
        assert!(err.to_string().contains("breakpoints"), "{err}");
    }

    #[test]
    fn value_and_sup() {
        let p = PiecewiseLinearPath::continuous(vec![0.0, 0.5, 1.0], vec![0.0, -1.0, 0.5]).unwrap();
        assert_eq!(p.value_at(0.25), -0.5);
        assert_eq!(p.value_at(1.0), 0.5);
        assert_eq!(p.sup_abs(), 1.0);
    }

    #[test]
    fn splice_keeps_pieces() {
        let f = PiecewiseLinearPath::continuous(vec![0.0, 0.2, 0.4, 1.0], vec![0.0, 0.5, 0.0, 0.0]).unwrap();
        let g = PiecewiseLinearPath::continuous(vec![0.0, 0.4, 1.0], vec![0.0, 0.0, -0.7]).unwrap();
        let h = f.splice(&g, 0.4).unwrap();
        assert_eq!(h.breakpoints(), &[0.0, 0.2, 0.4, 1.0]);
        assert_eq!(h.values(), &[0.0, 0.5, 0.0, -0.7]);
        assert!(!h.has_jump());
    }

    #[test]
    fn flat_then_ramp_shapes() {
        assert_eq!(PiecewiseLinearPath::flat_then_ramp(1.0, 3.0).unwrap(), PiecewiseLinearPath::zero());
        let p = PiecewiseLinearPath::flat_then_ramp(0.5, 2.0).unwrap();
        assert_eq!(p.values(), &[0.0, 0.0, 1.0]);
    }
}
