//! Exact exit probabilities of standard Brownian motion on `[0, 1]`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use libm::erfc;

const TERM_CUTOFF: f64 = 1e-15;

/// Upper tail `P(Z >= y)` of the standard normal.
pub fn normal_tail(y: f64) -> f64 {
    0.5 * erfc(y * FRAC_1_SQRT_2)
}

/// `P(sup_{[0,1]} W >= a) = 2 (1 - Phi(a))` (reflection principle).
pub fn one_sided_sup_oracle(a: f64) -> f64 {
    if a <= 0.0 {
        return 1.0;
    }
    2.0 * normal_tail(a)
}

/// `P(sup_{[0,1]} |W| >= a)` from the image series
/// `4 sum_j (-1)^j Q((2j+1) a)`; fast for moderate and large `a`.
pub fn two_sided_image_series(a: f64) -> f64 {
    let mut sum = 0.0;
    let mut sign = 1.0;
    for j in 0u32.. {
        let term = 4.0 * normal_tail(f64::from(2 * j + 1) * a);
        sum += sign * term;
        if term < TERM_CUTOFF {
            break;
        }
        sign = -sign;
    }
    sum.clamp(0.0, 1.0)
}

/// `P(sup_{[0,1]} |W| >= a)` from the eigenfunction series
/// `1 - (4/pi) sum_k (-1)^k / (2k+1) exp(-(2k+1)^2 pi^2 / (8 a^2))`;
/// fast for small `a`.
pub fn two_sided_fourier_series(a: f64) -> f64 {
    let mut stay = 0.0;
    let mut sign = 1.0;
    for k in 0u32.. {
        let odd = f64::from(2 * k + 1);
        let term = 4.0 / PI / odd * (-(odd * odd) * PI * PI / (8.0 * a * a)).exp();
        stay += sign * term;
        if term < TERM_CUTOFF {
            break;
        }
        sign = -sign;
    }
    (1.0 - stay).clamp(0.0, 1.0)
}

/// `P(sup_{[0,1]} |W| >= a)`.
pub fn wiener_sup_oracle(a: f64) -> f64 {
    if a <= 0.0 {
        1.0
    } else if a < 1.0 {
        two_sided_fourier_series(a)
    } else {
        two_sided_image_series(a)
    }
}
