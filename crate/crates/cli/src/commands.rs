use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use resetld::emit::{self, fmt_real};
use resetld::mc::{ldp_convergence_table, tube_probability, EstimatorBudget, SplittingConfig};
use resetld::rng::{stream, Domain};
use resetld::{
    optimal_path, rate_poisson, rate_reset, rate_wiener, simulate_trajectory, sup_rate, variational_minimize,
    ModelParams, PiecewiseLinearPath, SupRatePoint,
};

use crate::figures;
use crate::{Command, Format, Functional, Manifest};

#[derive(Debug, Error)]
pub enum Failure {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Runtime(String),
    #[error("{0}")]
    Io(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Runtime(_) => 3,
            Failure::Io(_) => 4,
        }
    }
}

impl From<resetld::Error> for Failure {
    fn from(e: resetld::Error) -> Self {
        match e {
            resetld::Error::Extinction { .. } => Failure::Runtime(e.to_string()),
            _ => Failure::Config(e.to_string()),
        }
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

struct Output {
    dir: PathBuf,
    formats: Vec<Format>,
}

impl Output {
    fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }

    /// CSV is written when asked for directly or as the source of a plot.
    fn wants_csv(&self) -> bool {
        self.wants(Format::Csv) || self.wants(Format::Svg)
    }

    fn wants_json(&self) -> bool {
        self.wants(Format::Json) || self.wants(Format::Svg)
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn write(&self, name: &str, bytes: impl AsRef<[u8]>) -> Result<PathBuf, Failure> {
        let path = self.path(name);
        fs::write(&path, bytes).map_err(|e| io_err(&path, e))?;
        Ok(path)
    }

    fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<PathBuf, Failure> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::Runtime(e.to_string()))?;
        text.push('\n');
        self.write(name, text)
    }

    fn write_with<F>(&self, name: &str, f: F) -> Result<PathBuf, Failure>
    where
        F: FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
    {
        let mut buf = Vec::new();
        f(&mut buf).map_err(|e| io_err(&self.path(name), e))?;
        self.write(name, buf)
    }
}

pub fn dispatch(command: Command, seed: u64, out: Option<PathBuf>, formats: Vec<Format>) -> Result<(), Failure> {
    let (command, seed, formats) = match command {
        Command::Replay { manifest } => {
            let text = fs::read_to_string(&manifest).map_err(|e| io_err(&manifest, e))?;
            let m: Manifest = serde_json::from_str(&text)
                .map_err(|e| Failure::Config(format!("{}: invalid manifest: {e}", manifest.display())))?;
            (m.command, m.seed, m.formats)
        }
        other => (other, seed, formats),
    };
    let dir = out.ok_or_else(|| Failure::Config("missing output directory: pass --out <DIR>".into()))?;
    if !dir.is_dir() {
        return Err(Failure::Io(format!("output directory {} does not exist", dir.display())));
    }
    let output = Output { dir, formats };
    let manifest = Manifest {
        artifact: "resetld".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        seed,
        formats: output.formats.clone(),
        command: command.clone(),
    };
    output.write_json("manifest.json", &manifest)?;
    run(command, seed, &output)
}

fn run(command: Command, seed: u64, out: &Output) -> Result<(), Failure> {
    match command {
        Command::Simulate {
            lambda,
            n,
            grid_points,
            bridge,
        } => simulate(lambda, n, grid_points, bridge, seed, out),
        Command::Rate {
            path,
            lambda,
            functional,
        } => rate(&path, lambda, functional, out),
        Command::SupCurve {
            lambda,
            x_min,
            x_max,
            points,
            x,
            paths_for,
        } => sup_curve(lambda, x_min, x_max, points, x, &paths_for, out),
        Command::OptimalPath { x, lambda } => optimal(x, lambda, out),
        Command::Minimize {
            x,
            lambda,
            segments,
            restarts,
        } => minimize(x, lambda, segments, restarts, seed, out),
        Command::Verify {
            lambda,
            x,
            n,
            crude_trials,
            particles,
            replicates,
            levels,
            crude_threshold,
            grid_points,
            no_bridge,
        } => {
            let budget = EstimatorBudget {
                crude_trials,
                splitting: SplittingConfig {
                    levels,
                    particles,
                    replicates,
                },
                crude_threshold,
                grid_points,
                bridge_correction: !no_bridge,
                seed,
            };
            verify(lambda, x, &n, &budget, out)
        }
        Command::Tube {
            lambda,
            n,
            path,
            slope,
            eps,
            trials,
            grid_points,
        } => tube(lambda, &n, path.as_deref(), slope, eps, trials, grid_points, seed, out),
        Command::Replay { .. } => Err(Failure::Config("a manifest cannot record a replay".into())),
    }
}

fn simulate(lambda: f64, n: u32, grid_points: usize, bridge: bool, seed: u64, out: &Output) -> Result<(), Failure> {
    let params = ModelParams::new(lambda, n)
        .with_grid_points(grid_points)
        .with_bridge_correction(bridge)
        .with_seed(seed);
    params.validate()?;
    let mut rng = stream(seed, Domain::Trajectory, &[], 0);
    let sample = simulate_trajectory(&params, &mut rng);
    if out.wants_csv() {
        out.write_with("trajectory.csv", |b| emit::write_trajectory_csv(b, &sample))?;
    }
    if out.wants_json() {
        out.write_with("trajectory.json", |b| emit::write_trajectory_sidecar(b, &sample))?;
    }
    if out.wants(Format::Svg) {
        let svg = figures::trajectory_svg(&out.path("trajectory.csv"), &out.path("trajectory.json"))?;
        out.write("trajectory.svg", svg)?;
    }
    println!(
        "simulated {} points, {} resets, sup|xi| = {}",
        sample.times.len(),
        sample.reset_count(),
        fmt_real(sample.sup_abs)
    );
    Ok(())
}

fn read_path(path: &Path) -> Result<PiecewiseLinearPath, Failure> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    serde_json::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn check_lambda(lambda: f64) -> Result<(), Failure> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Failure::Config(format!("invalid parameter `lambda`: must be > 0, got {lambda}")))
    }
}

fn rate(path: &Path, lambda: f64, functional: Functional, out: &Output) -> Result<(), Failure> {
    let f = read_path(path)?;
    let result = match functional {
        Functional::Reset => {
            check_lambda(lambda)?;
            rate_reset(&f, lambda)
        }
        Functional::Wiener => rate_wiener(&f),
        Functional::Poisson => {
            check_lambda(lambda)?;
            rate_poisson(&f, lambda)
        }
    };
    out.write_json("rate.json", &result)?;
    println!("{}", serde_json::to_string(&result).map_err(|e| Failure::Runtime(e.to_string()))?);
    Ok(())
}

#[derive(Serialize)]
struct SupRow {
    x: f64,
    finite: bool,
    rate: Option<f64>,
    s_star: Option<f64>,
    k_star: Option<f64>,
    regime: resetld::Regime,
}

impl From<&SupRatePoint> for SupRow {
    fn from(p: &SupRatePoint) -> Self {
        let fin = |v: f64| v.is_finite().then_some(v);
        Self {
            x: p.x,
            finite: p.rate.is_finite(),
            rate: fin(p.rate),
            s_star: fin(p.s_star),
            k_star: fin(p.k_star),
            regime: p.regime,
        }
    }
}

fn sup_curve(
    lambda: f64,
    x_min: f64,
    x_max: f64,
    points: usize,
    explicit: Vec<f64>,
    paths_for: &[f64],
    out: &Output,
) -> Result<(), Failure> {
    check_lambda(lambda)?;
    let xs = if explicit.is_empty() {
        if points == 0 {
            return Err(Failure::Config("invalid parameter `points`: must be >= 1".into()));
        }
        if !(x_max >= x_min) {
            return Err(Failure::Config("invalid parameter `x_max`: must be >= x_min".into()));
        }
        if points == 1 {
            vec![x_min]
        } else {
            (0..points)
                .map(|i| x_min + (x_max - x_min) * i as f64 / (points - 1) as f64)
                .collect()
        }
    } else {
        explicit
    };
    let curve: Vec<SupRatePoint> = xs.iter().map(|&x| sup_rate(x, lambda)).collect();
    if out.wants_csv() {
        out.write_with("sup_curve.csv", |b| emit::write_sup_curve_csv(b, &curve))?;
    }
    if out.wants(Format::Json) {
        let rows: Vec<SupRow> = curve.iter().map(SupRow::from).collect();
        out.write_json("sup_curve.json", &rows)?;
    }
    if out.wants(Format::Svg) {
        out.write("sup_curve.svg", figures::sup_curve_svg(&out.path("sup_curve.csv"), lambda)?)?;
        let paths = paths_for
            .iter()
            .filter(|&&x| x >= 0.0)
            .map(|&x| optimal_path(x, lambda).map(|p| (x, p)))
            .collect::<Result<Vec<_>, _>>()?;
        out.write("optimal_paths.svg", figures::optimal_paths_svg(&paths, lambda))?;
    }
    println!("wrote {} rate points", curve.len());
    Ok(())
}

fn write_path_csv(out: &Output, name: &str, path: &PiecewiseLinearPath) -> Result<PathBuf, Failure> {
    let mut text = String::from("t,f\n");
    for (t, v) in path.breakpoints().iter().zip(path.values()) {
        text.push_str(&format!("{},{}\n", fmt_real(*t), fmt_real(*v)));
    }
    out.write(name, text)
}

fn optimal(x: f64, lambda: f64, out: &Output) -> Result<(), Failure> {
    check_lambda(lambda)?;
    let path = optimal_path(x, lambda)?;
    let closed = sup_rate(x, lambda);
    let r = rate_reset(&path, lambda);
    if out.wants_csv() {
        write_path_csv(out, "optimal_path.csv", &path)?;
    }
    if out.wants(Format::Json) {
        #[derive(Serialize)]
        struct Record<'a> {
            x: f64,
            lambda: f64,
            sup_rate: SupRow,
            path_rate: resetld::RateResult,
            path: &'a PiecewiseLinearPath,
        }
        out.write_json(
            "optimal_path.json",
            &Record {
                x,
                lambda,
                sup_rate: SupRow::from(&closed),
                path_rate: r,
                path: &path,
            },
        )?;
    }
    println!("I_sup({}) = {}, rate of optimal path = {}", x, fmt_real(closed.rate), fmt_real(r.value));
    Ok(())
}

fn minimize(x: f64, lambda: f64, segments: usize, restarts: usize, seed: u64, out: &Output) -> Result<(), Failure> {
    check_lambda(lambda)?;
    let mut rng = stream(seed, Domain::Variational, &[u64::MAX], 0);
    let result = variational_minimize(x, lambda, segments, restarts, &mut rng)?;
    let closed = sup_rate(x, lambda).rate;
    let gap = if closed > 0.0 {
        (result.best_rate - closed) / closed
    } else {
        result.best_rate
    };
    if out.wants_csv() {
        write_path_csv(out, "minimize.csv", &result.best_path)?;
    }
    if out.wants(Format::Json) {
        #[derive(Serialize)]
        struct Record<'a> {
            x: f64,
            lambda: f64,
            segments: usize,
            restarts: usize,
            best_rate: f64,
            closed_form_rate: f64,
            relative_gap: f64,
            restart_rates: &'a [f64],
            best_path: &'a PiecewiseLinearPath,
        }
        out.write_json(
            "minimize.json",
            &Record {
                x,
                lambda,
                segments,
                restarts,
                best_rate: result.best_rate,
                closed_form_rate: closed,
                relative_gap: gap,
                restart_rates: &result.restart_rates,
                best_path: &result.best_path,
            },
        )?;
    }
    println!(
        "best rate {} vs closed form {} (relative gap {:.3e})",
        fmt_real(result.best_rate),
        fmt_real(closed),
        gap
    );
    Ok(())
}

fn verify(lambda: f64, x: f64, n: &[u32], budget: &EstimatorBudget, out: &Output) -> Result<(), Failure> {
    let table = ldp_convergence_table(lambda, x, n, budget)?;
    if out.wants_csv() {
        out.write_with("convergence.csv", |b| emit::write_convergence_csv(b, &table))?;
    }
    if out.wants(Format::Json) {
        out.write_json("convergence.json", &table)?;
    }
    if out.wants(Format::Svg) {
        out.write("convergence.svg", figures::convergence_svg(&out.path("convergence.csv"))?)?;
    }
    for row in &table.rows {
        println!(
            "n={} {} p_hat={} log_rate={}",
            row.n,
            row.estimate.estimator.name(),
            fmt_real(row.estimate.p_hat),
            fmt_real(row.estimate.log_rate)
        );
    }
    println!(
        "target {} richardson {}",
        fmt_real(table.target_rate),
        table.richardson.map_or("n/a".into(), fmt_real)
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn tube(
    lambda: f64,
    ns: &[u32],
    path: Option<&Path>,
    slope: f64,
    eps: f64,
    trials: u64,
    grid_points: usize,
    seed: u64,
    out: &Output,
) -> Result<(), Failure> {
    check_lambda(lambda)?;
    if ns.is_empty() {
        return Err(Failure::Config("invalid parameter `n`: need at least one value".into()));
    }
    let f = match path {
        Some(p) => read_path(p)?,
        None => PiecewiseLinearPath::linear(slope),
    };
    let path_rate = rate_reset(&f, lambda).value;
    let mut estimates = Vec::with_capacity(ns.len());
    for &n in ns {
        let params = ModelParams::new(lambda, n)
            .with_grid_points(grid_points)
            .with_seed(resetld::rng::mix_key(seed, &[u64::from(n)]));
        estimates.push(tube_probability(&params, &f, eps, trials)?);
    }
    if out.wants_csv() {
        let mut text = String::from("n,p_hat,ci_low,ci_high,log_rate,path_rate\n");
        for e in &estimates {
            text.push_str(&format!(
                "{},{},{},{},{},{}\n",
                e.n,
                fmt_real(e.p_hat),
                fmt_real(e.ci_low),
                fmt_real(e.ci_high),
                fmt_real(e.log_rate),
                fmt_real(path_rate)
            ));
        }
        out.write("tube.csv", text)?;
    }
    if out.wants(Format::Json) {
        out.write_json("tube.json", &estimates)?;
    }
    for e in &estimates {
        println!("n={} p_hat={} log_rate={}", e.n, fmt_real(e.p_hat), fmt_real(e.log_rate));
    }
    Ok(())
}
