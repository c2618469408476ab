//! Text output formats.
//!
//! Reals are written with 17 significant digits in scientific notation;
//! infinities are written as `inf` / `-inf` in CSV.

use std::io::{self, Write};

use crate::mc::ConvergenceTable;
use crate::process::TrajectorySample;
use crate::sup::SupRatePoint;

pub const TRAJECTORY_HEADER: &str = "t,xi,w";
pub const SUP_CURVE_HEADER: &str = "x,rate,s_star,k_star,regime";
pub const CONVERGENCE_HEADER: &str = "n,estimator,p_hat,ci_low,ci_high,log_rate,target_rate";

/// 17 significant digits, `inf`/`-inf`/`nan` for non-finite values.
pub fn fmt_real(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v == f64::INFINITY {
        "inf".to_string()
    } else if v == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{v:.16e}")
    }
}

/// Parses a value written by [`fmt_real`].
pub fn parse_real(s: &str) -> Option<f64> {
    match s {
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        "nan" => Some(f64::NAN),
        _ => s.parse().ok(),
    }
}

pub fn write_trajectory_csv<W: Write>(mut out: W, sample: &TrajectorySample) -> io::Result<()> {
    writeln!(out, "{TRAJECTORY_HEADER}")?;
    for ((t, xi), w) in sample.times.iter().zip(&sample.xi_values).zip(&sample.w_values) {
        writeln!(out, "{},{},{}", fmt_real(*t), fmt_real(*xi), fmt_real(*w))?;
    }
    Ok(())
}

/// Sidecar `{"reset_times":[...],"sup_abs":...}`.
pub fn write_trajectory_sidecar<W: Write>(mut out: W, sample: &TrajectorySample) -> io::Result<()> {
    let times: Vec<String> = sample.reset_times.iter().map(|t| fmt_real(*t)).collect();
    writeln!(
        out,
        "{{\"reset_times\":[{}],\"sup_abs\":{}}}",
        times.join(","),
        fmt_real(sample.sup_abs)
    )
}

pub fn write_sup_curve_csv<W: Write>(mut out: W, points: &[SupRatePoint]) -> io::Result<()> {
    writeln!(out, "{SUP_CURVE_HEADER}")?;
    for p in points {
        writeln!(
            out,
            "{},{},{},{},{}",
            fmt_real(p.x),
            fmt_real(p.rate),
            fmt_real(p.s_star),
            fmt_real(p.k_star),
            p.regime.name()
        )?;
    }
    Ok(())
}

pub fn write_convergence_csv<W: Write>(mut out: W, table: &ConvergenceTable) -> io::Result<()> {
    writeln!(out, "{CONVERGENCE_HEADER}")?;
    for row in &table.rows {
        let e = &row.estimate;
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            row.n,
            e.estimator.name(),
            fmt_real(e.p_hat),
            fmt_real(e.ci_low),
            fmt_real(e.ci_high),
            fmt_real(e.log_rate),
            fmt_real(table.target_rate)
        )?;
    }
    Ok(())
}
