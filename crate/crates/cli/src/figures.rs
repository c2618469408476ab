//! Figures are built from the CSV files already on disk, so a plot always
//! shows exactly what was written.

use std::fs;
use std::path::Path;

use resetld::emit::parse_real;
use resetld::PiecewiseLinearPath;

use crate::svg::{Plot, Polyline, Segment};
use crate::Failure;

const PALETTE: [&str; 6] = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02"];

fn read_rows(path: &Path, header: &str) -> Result<Vec<Vec<String>>, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    let mut lines = text.lines();
    if lines.next() != Some(header) {
        return Err(Failure::Runtime(format!("{}: unexpected header", path.display())));
    }
    Ok(lines
        .filter(|l| !l.is_empty())
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect())
}

fn real(path: &Path, s: &str) -> Result<f64, Failure> {
    parse_real(s).ok_or_else(|| Failure::Runtime(format!("{}: bad number `{s}`", path.display())))
}

/// `w` in black, `xi` in blue, a red drop at every reset.
pub fn trajectory_svg(csv: &Path, sidecar: &Path) -> Result<String, Failure> {
    let rows = read_rows(csv, resetld::emit::TRAJECTORY_HEADER)?;
    let mut t = Vec::with_capacity(rows.len());
    let mut xi = Vec::with_capacity(rows.len());
    let mut w = Vec::with_capacity(rows.len());
    for r in &rows {
        if r.len() != 3 {
            return Err(Failure::Runtime(format!("{}: expected 3 columns", csv.display())));
        }
        t.push(real(csv, &r[0])?);
        xi.push(real(csv, &r[1])?);
        w.push(real(csv, &r[2])?);
    }
    let text = fs::read_to_string(sidecar).map_err(|e| Failure::Io(format!("{}: {e}", sidecar.display())))?;
    let meta: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Failure::Runtime(format!("{}: {e}", sidecar.display())))?;
    let resets: Vec<f64> = meta["reset_times"]
        .as_array()
        .map(|a| a.iter().filter_map(|v| v.as_f64()).collect())
        .unwrap_or_default();

    let mut xi_line = Vec::with_capacity(t.len() + resets.len());
    let mut drops = Vec::with_capacity(resets.len());
    let mut anchor = 0.0;
    let mut next = resets.iter().peekable();
    for i in 0..t.len() {
        if next.peek().is_some_and(|&&r| r == t[i]) {
            next.next();
            let left = w[i] - anchor;
            xi_line.push((t[i], left));
            drops.push(Segment {
                from: (t[i], left),
                to: (t[i], 0.0),
                color: "red",
            });
            anchor = w[i];
        }
        xi_line.push((t[i], xi[i]));
    }
    let plot = Plot {
        title: "Trajectory with resets".into(),
        x_label: "t".into(),
        y_label: "value".into(),
        lines: vec![
            Polyline {
                points: t.iter().copied().zip(w.iter().copied()).collect(),
                color: "black",
                class: "w",
            },
            Polyline {
                points: xi_line,
                color: "blue",
                class: "xi",
            },
        ],
        segments: drops,
    };
    Ok(plot.render())
}

/// Rate on the horizontal axis, level on the vertical one.
pub fn sup_curve_svg(csv: &Path, lambda: f64) -> Result<String, Failure> {
    let rows = read_rows(csv, resetld::emit::SUP_CURVE_HEADER)?;
    let mut points = Vec::new();
    for r in &rows {
        let x = real(csv, &r[0])?;
        let rate = real(csv, &r[1])?;
        if rate.is_finite() {
            points.push((rate, x));
        }
    }
    let plot = Plot {
        title: format!("Supremum rate, lambda = {lambda}"),
        x_label: "I_sup(x)".into(),
        y_label: "x".into(),
        lines: vec![Polyline {
            points,
            color: "black",
            class: "rate",
        }],
        segments: Vec::new(),
    };
    Ok(plot.render())
}

pub fn optimal_paths_svg(paths: &[(f64, PiecewiseLinearPath)], lambda: f64) -> String {
    let lines = paths
        .iter()
        .enumerate()
        .map(|(i, (_, p))| Polyline {
            points: p.breakpoints().iter().copied().zip(p.values().iter().copied()).collect(),
            color: PALETTE[i % PALETTE.len()],
            class: "path",
        })
        .collect();
    let levels: Vec<String> = paths.iter().map(|(x, _)| x.to_string()).collect();
    Plot {
        title: format!("Optimal paths, lambda = {lambda}, x = {}", levels.join(", ")),
        x_label: "t".into(),
        y_label: "f(t)".into(),
        lines,
        segments: Vec::new(),
    }
    .render()
}

pub fn convergence_svg(csv: &Path) -> Result<String, Failure> {
    let rows = read_rows(csv, resetld::emit::CONVERGENCE_HEADER)?;
    let mut estimates = Vec::new();
    let mut target = f64::NAN;
    for r in &rows {
        let n = real(csv, &r[0])?;
        let lr = real(csv, &r[5])?;
        target = real(csv, &r[6])?;
        if lr.is_finite() {
            estimates.push((n, lr));
        }
    }
    let (n0, n1) = estimates
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.0), b.max(p.0)));
    let mut lines = vec![Polyline {
        points: estimates,
        color: "blue",
        class: "estimate",
    }];
    if target.is_finite() && n0.is_finite() {
        lines.push(Polyline {
            points: vec![(n0, target), (n1, target)],
            color: "gray",
            class: "target",
        });
    }
    Ok(Plot {
        title: "-(1/n) ln P(sup |xi_n| >= x)".into(),
        x_label: "n".into(),
        y_label: "log-rate".into(),
        lines,
        segments: Vec::new(),
    }
    .render())
}
