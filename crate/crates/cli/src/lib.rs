//! Batch front-end for the `hyperheat` library: identity validation, solves,
//! kernel tables, convergence sweeps and rate checks, all emitted as CSV.

pub mod args;
pub mod rates;
pub mod validate;

use std::io::Write;
use std::path::{Path, PathBuf};

use hyperheat::evolution::{solve_with_threads, HeatKernel, SolveConfig, Window};
use hyperheat::oracle::{fit_order, BoundaryCondition};
use hyperheat::sum::nan_max;
use hyperheat::{Complex64, Error, GridParams};
use thiserror::Error as ThisError;

pub use args::{Cli, Command};
use validate::{run_validate, ValidationOptions};

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Core(
                Error::Overflow { .. }
                | Error::NonFinite { .. }
                | Error::QuadratureNotConverged { .. }
                | Error::LengthMismatch { .. }
                | Error::GridMismatch { .. },
            ) => 1,
            _ => 2,
        }
    }
}

/// How a command finished when it did not hit an error.
#[derive(Debug, Clone, PartialEq)]
pub enum Status {
    Pass,
    /// A check failed; the message names it.
    Fail(String),
}

impl Status {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Pass => 0,
            Self::Fail(_) => 1,
        }
    }
}

/// Everything that determines a run's output.
#[derive(Debug, Clone)]
pub struct RunManifest {
    pub command: Command,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub threads: usize,
}

impl From<Cli> for RunManifest {
    fn from(cli: Cli) -> Self {
        Self {
            command: cli.command,
            out: cli.out,
            seed: cli.seed,
            threads: cli.threads.max(1),
        }
    }
}

/// Parses `a,b,c` or `start:stop:step` (inclusive of `stop` up to rounding).
pub fn parse_list(s: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Config(format!("cannot parse list '{s}'"));
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [start, stop, step] => {
            let num = |p: &str| p.trim().parse::<f64>().map_err(|_| bad());
            let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
            if !(step > 0.0 && start.is_finite() && stop.is_finite() && stop >= start) {
                return Err(bad());
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            // rounding keeps 0.1-style steps printing cleanly
            Ok((0..count)
                .map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12)
                .collect())
        }
        [single] => single
            .split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect(),
        _ => Err(bad()),
    }
}

fn parse_sizes(s: &str) -> Result<Vec<usize>, CliError> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Config(format!("bad grid size '{p}'")))
        })
        .collect()
}

/// Reads `x,re[,im]` lines; `#` starts a comment.
pub fn load_samples(path: &Path) -> Result<BoundaryCondition, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)?;
    let mut points = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let field = |i: usize| -> Result<f64, CliError> {
            record
                .get(i)
                .unwrap_or("0")
                .parse::<f64>()
                .map_err(|_| CliError::Config(format!("{}: bad number on record {}", path.display(), line + 1)))
        };
        if record.len() < 2 || record.len() > 3 {
            return Err(CliError::Config(format!(
                "{}: record {} needs x,re[,im]",
                path.display(),
                line + 1
            )));
        }
        points.push((field(0)?, Complex64::new(field(1)?, field(2)?)));
    }
    Ok(BoundaryCondition::sampled(points)?)
}

pub fn parse_boundary(spec: &str) -> Result<BoundaryCondition, CliError> {
    match spec.strip_prefix("file:") {
        Some(path) => load_samples(Path::new(path)),
        None => Ok(BoundaryCondition::parse(spec)?),
    }
}

fn csv_writer(sink: &mut dyn Write) -> csv::Writer<&mut dyn Write> {
    csv::WriterBuilder::new().from_writer(sink)
}

fn opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// Runs one command, writing its CSV to `sink`.
pub fn run(manifest: &RunManifest, sink: &mut dyn Write) -> Result<Status, CliError> {
    match &manifest.command {
        Command::Validate(a) => {
            let mut opts = ValidationOptions::new(manifest.seed, a.max_n);
            opts.samples = a.samples;
            run_validate_to(&opts, sink)
        }
        Command::Solve(a) => {
            let config = SolveConfig {
                n: a.n,
                omega: a.omega,
                omega_prime: a.omega_prime,
                boundary: parse_boundary(&a.g)?,
                times: parse_list(&a.times)?,
                xs: parse_list(&a.xs)?,
            };
            run_solve(&config, manifest.threads, sink)
        }
        Command::Kernel(a) => run_kernel(a.n, a.omega_prime, &parse_list(&a.times)?, &parse_list(&a.xs)?, sink),
        Command::Converge(a) => {
            let base = SolveConfig {
                n: 0,
                omega: a.omega,
                omega_prime: a.omega_prime,
                boundary: parse_boundary(&a.g)?,
                times: parse_list(&a.times)?,
                xs: parse_list(&a.xs)?,
            };
            run_converge(&base, &parse_sizes(&a.n_list)?, manifest.threads, sink).map(|_| Status::Pass)
        }
        Command::Rates => run_rates_to(sink),
    }
}

pub fn run_validate_to(opts: &ValidationOptions, sink: &mut dyn Write) -> Result<Status, CliError> {
    let report = run_validate(opts)?;
    let mut w = csv_writer(sink);
    w.write_record(["identity", "n", "max_residual", "tolerance", "pass"])?;
    for r in &report.rows {
        w.write_record([
            r.identity.to_string(),
            r.n.to_string(),
            r.residual.to_string(),
            r.tolerance.to_string(),
            r.pass().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(match report.first_failure() {
        None => Status::Pass,
        Some(r) => Status::Fail(format!(
            "{} failed at n={}: residual {:e} > {:e}",
            r.identity, r.n, r.residual, r.tolerance
        )),
    })
}

pub fn run_solve(config: &SolveConfig, threads: usize, sink: &mut dyn Write) -> Result<Status, CliError> {
    let out = solve_with_threads(config, threads)?;
    for warning in &out.warnings {
        eprintln!("warning: {warning}");
    }
    let mut w = csv_writer(sink);
    w.write_record(["t", "x", "u_re", "u_im_diag", "oracle", "abs_err"])?;
    for p in &out.points {
        let oracle = config.boundary.closed_form(p.t, p.x).map(|c| c.re);
        w.write_record([
            p.t.to_string(),
            p.x.to_string(),
            p.u.re.to_string(),
            p.u.im.to_string(),
            opt(oracle),
            opt(oracle.map(|o| (p.u.re - o).abs())),
        ])?;
    }
    w.flush()?;
    Ok(Status::Pass)
}

pub fn run_kernel(
    n: usize,
    omega_prime: f64,
    times: &[f64],
    zs: &[f64],
    sink: &mut dyn Write,
) -> Result<Status, CliError> {
    let params = GridParams::new(n)?;
    let window = Window::new(params, omega_prime)?;
    let mut w = csv_writer(sink);
    w.write_record(["t", "z", "kernel_re", "kernel_im", "gaussian", "abs_err"])?;
    for &t in times {
        if t.is_nan() || t <= 0.0 {
            return Err(Error::NonPositiveTime(t).into());
        }
        let kernel = HeatKernel::new(t, &window)?;
        for &z in zs {
            let m = params.cell_of(z);
            if !params.contains(m) {
                return Err(CliError::Config(format!("offset {z} outside the grid")));
            }
            let zg = params.coordinate(m);
            let v = kernel.at(m);
            let gauss = (-zg * zg / (4.0 * t)).exp() / (4.0 * std::f64::consts::PI * t).sqrt();
            w.write_record([
                t.to_string(),
                zg.to_string(),
                v.re.to_string(),
                v.im.to_string(),
                gauss.to_string(),
                (v.re - gauss).abs().to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(Status::Pass)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub max_abs_err: f64,
    pub sufficient_regime: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    pub order: Option<f64>,
}

/// Max error against the closed form for each grid size, and the fitted order.
pub fn convergence_study(base: &SolveConfig, sizes: &[usize], threads: usize) -> Result<ConvergenceReport, CliError> {
    if sizes.len() < 3 {
        return Err(CliError::Config(format!("converge needs at least 3 grid sizes, got {}", sizes.len())));
    }
    if base.boundary.closed_form(1.0, 0.0).is_none() {
        return Err(CliError::Config(
            "converge needs a boundary with a closed-form solution (gaussian or indicator)".into(),
        ));
    }
    let mut rows = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let config = SolveConfig { n, ..base.clone() };
        let out = solve_with_threads(&config, threads)?;
        let max_abs_err = out
            .points
            .iter()
            .map(|p| (p.u.re - base.boundary.closed_form(p.t, p.x).expect("checked above").re).abs())
            .fold(0.0, nan_max);
        rows.push(ConvergenceRow {
            n,
            max_abs_err,
            sufficient_regime: out.sufficient_regime,
        });
    }
    let ns: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let errs: Vec<f64> = rows.iter().map(|r| r.max_abs_err).collect();
    Ok(ConvergenceReport {
        order: fit_order(&ns, &errs),
        rows,
    })
}

pub fn run_converge(
    base: &SolveConfig,
    sizes: &[usize],
    threads: usize,
    sink: &mut dyn Write,
) -> Result<ConvergenceReport, CliError> {
    let report = convergence_study(base, sizes, threads)?;
    let mut w = csv_writer(sink);
    w.write_record(["n", "max_abs_err", "sufficient_regime"])?;
    for r in &report.rows {
        w.write_record([r.n.to_string(), r.max_abs_err.to_string(), r.sufficient_regime.to_string()])?;
    }
    w.flush()?;
    eprintln!("fitted order: {}", opt(report.order));
    Ok(report)
}

pub fn run_rates_to(sink: &mut dyn Write) -> Result<Status, CliError> {
    let rows = rates::run_rates()?;
    let mut w = csv_writer(sink);
    w.write_record(["check", "param", "observed", "bound_or_bracket", "pass"])?;
    for r in &rows {
        w.write_record([
            r.check.clone(),
            r.param.clone(),
            r.observed.to_string(),
            r.bound_or_bracket.clone(),
            r.pass.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(match rows.iter().find(|r| !r.pass) {
        None => Status::Pass,
        Some(r) => Status::Fail(format!("{} ({}) failed: {} vs {}", r.check, r.param, r.observed, r.bound_or_bracket)),
    })
}
