//! Property checks of the rate functional on random admissible paths.

use proptest::prelude::*;
use resetld::path::LinearPiece;
use resetld::rate::nonzero_measure;
use resetld::{rate_reset, rate_wiener, sup_rate, PiecewiseLinearPath};

const CASES: u32 = 1000;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

/// Pieces covering `[t0, t1]`, starting at 0, with zero stretches and jumps
/// back to 0 mixed in. `end_at_zero` forces the final value to 0.
fn pieces_on(t0: f64, t1: f64, end_at_zero: bool) -> impl Strategy<Value = Vec<LinearPiece>> {
    pieces_with(t0, t1, end_at_zero, true)
}

fn pieces_with(t0: f64, t1: f64, end_at_zero: bool, jumps: bool) -> impl Strategy<Value = Vec<LinearPiece>> {
    (1usize..8)
        .prop_flat_map(|m| {
            (
                proptest::collection::vec(0.0..1.0f64, m - 1),
                proptest::collection::vec((-2.0..2.0f64, 0u8..10), m),
            )
        })
        .prop_map(move |(mut cuts, ends)| {
            cuts.sort_by(f64::total_cmp);
            let mut bps = vec![t0];
            for c in cuts {
                let t = t0 + c * (t1 - t0);
                if t > *bps.last().unwrap() + 1e-6 && t < t1 - 1e-6 {
                    bps.push(t);
                }
            }
            bps.push(t1);
            let mut pieces = Vec::new();
            let mut prev = 0.0;
            for (i, w) in bps.windows(2).enumerate() {
                let (end, kind) = ends[i.min(ends.len() - 1)];
                let (start, end) = match kind {
                    0..=2 if jumps || prev == 0.0 => (0.0, 0.0),
                    3 if jumps => (0.0, end),
                    _ => (prev, end),
                };
                pieces.push(LinearPiece {
                    t0: w[0],
                    t1: w[1],
                    start,
                    end,
                });
                prev = end;
            }
            if end_at_zero {
                pieces.last_mut().unwrap().end = 0.0;
            }
            pieces
        })
}

fn admissible() -> impl Strategy<Value = PiecewiseLinearPath> {
    pieces_on(0.0, 1.0, false).prop_map(|p| PiecewiseLinearPath::from_pieces(&p).unwrap())
}

fn jump_free() -> impl Strategy<Value = PiecewiseLinearPath> {
    pieces_with(0.0, 1.0, false, false).prop_map(|p| PiecewiseLinearPath::from_pieces(&p).unwrap())
}

fn zero_on(t0: f64, t1: f64) -> LinearPiece {
    LinearPiece {
        t0,
        t1,
        start: 0.0,
        end: 0.0,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(CASES))]

    #[test]
    fn scaling_law(f in admissible(), c in prop_oneof![-3.0..-0.1f64, 0.1..3.0f64], lambda in 0.1..3.0f64) {
        let a = rate_reset(&f, lambda);
        let b = rate_reset(&f.scaled(c), lambda);
        prop_assert!(a.finite && b.finite);
        prop_assert!(close(b.kinetic_term, c * c * a.kinetic_term));
        prop_assert_eq!(b.reset_term, a.reset_term);
    }

    #[test]
    fn cauchy_schwarz_bound(f in admissible()) {
        let r = rate_reset(&f, 1.0);
        let s = f.sup_abs();
        prop_assert!(s * s <= nonzero_measure(&f) * 2.0 * r.kinetic_term * (1.0 + 1e-12) + 1e-15);
    }

    #[test]
    fn rate_dominates_sup_rate(f in admissible(), lambda in 0.1..3.0f64) {
        let r = rate_reset(&f, lambda).value;
        let bound = sup_rate(f.sup_abs(), lambda).rate;
        prop_assert!(r >= bound * (1.0 - 1e-12), "{r} < {bound}");
    }

    #[test]
    fn bounded_by_wiener_plus_lambda(f in jump_free(), lambda in 0.1..3.0f64) {
        prop_assert!(!f.has_jump());
        let r = rate_reset(&f, lambda).value;
        prop_assert!(r <= lambda + rate_wiener(&f).value + 1e-12);
    }

    #[test]
    fn concatenation_additivity(
        (left, right) in (0.1..0.9f64).prop_flat_map(|tau| (pieces_on(0.0, tau, true), pieces_on(tau, 1.0, false))),
        lambda in 0.1..3.0f64,
    ) {
        let tau0 = left.last().unwrap().t1;
        let glued: Vec<LinearPiece> = left.iter().chain(&right).copied().collect();
        let mut first = left.clone();
        first.push(zero_on(tau0, 1.0));
        let mut second = vec![zero_on(0.0, tau0)];
        second.extend(right.iter().copied());
        let whole = rate_reset(&PiecewiseLinearPath::from_pieces(&glued).unwrap(), lambda);
        let a = rate_reset(&PiecewiseLinearPath::from_pieces(&first).unwrap(), lambda);
        let b = rate_reset(&PiecewiseLinearPath::from_pieces(&second).unwrap(), lambda);
        prop_assert!(whole.finite && a.finite && b.finite);
        prop_assert!(close(whole.value, a.value + b.value));
    }
}

#[test]
fn splice_glues_at_a_common_zero() {
    let f = PiecewiseLinearPath::continuous(vec![0.0, 0.25, 0.5, 1.0], vec![0.0, 1.0, 0.0, 0.0]).unwrap();
    let g = PiecewiseLinearPath::continuous(vec![0.0, 0.5, 1.0], vec![0.0, 0.0, -2.0]).unwrap();
    let h = f.splice(&g, 0.5).unwrap();
    let lambda = 1.3;
    assert!(close(
        rate_reset(&h, lambda).value,
        rate_reset(&f, lambda).value + rate_reset(&g, lambda).value
    ));
}
