//! Time evolution: the explicit stepper, the closed-form spectral recursion,
//! discrete convolution, the windowed heat kernel and the end-to-end solver.
//!
//! The explicit stepper advances `f ← f + (1/n)·d_xx f`. With `dt/dx² = n`
//! it amplifies high frequencies by up to `1 + 4n` per step, so it only
//! serves to validate the spectral formulas. Solving goes through the
//! windowed spectral path: transform the truncated boundary data, multiply
//! by `½·h(t,·)` on `|k| ≤ ω′n`, and invert at the query points.

use log::warn;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{d_xx, Field, GridFunction, GridParams};
use crate::oracle::BoundaryCondition;
use crate::sum::{nan_max, CompensatedSum};
use crate::transform::{self, BoundaryCorrections, PhaseTable, SpectralSymbols};

/// `evolve` gives up once any value exceeds this modulus.
pub const OVERFLOW_LIMIT: f64 = 1e100;

/// Largest grid parameter for which `solve_via_convolution` materializes the kernel.
pub const CONVOLUTION_MAX_N: usize = 64;

/// `z^e` by binary powering.
pub fn complex_powu(z: Complex64, mut e: u64) -> Complex64 {
    let mut base = z;
    let mut acc = Complex64::new(1.0, 0.0);
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base *= base;
        e >>= 1;
    }
    acc
}

/// Frequency truncation: `½` on `|k| ≤ ω′n`, zero elsewhere.
#[derive(Debug, Clone)]
pub struct Window {
    radius: f64,
    half_width: i64,
    values: GridFunction,
}

impl Window {
    pub fn new(params: GridParams, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0 && radius <= params.n() as f64) {
            return Err(Error::InvalidConfig(format!(
                "window radius must lie in (0, {}], got {radius}",
                params.n()
            )));
        }
        let half_width = params.cell_of(radius);
        let values = GridFunction::from_index_fn(params, |k| {
            if k.abs() <= half_width {
                Complex64::new(0.5, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Ok(Self {
            radius,
            half_width,
            values,
        })
    }

    /// The untruncated window, `½` at every frequency.
    pub fn full(params: GridParams) -> Self {
        Self::new(params, params.n() as f64).expect("radius n is admissible")
    }

    pub fn params(&self) -> GridParams {
        self.values.params()
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// `⌊ω′n⌋`; frequencies `|k|` up to this value are kept.
    pub fn half_width(&self) -> i64 {
        self.half_width
    }

    /// Kept frequency indices, clipped to the grid.
    pub fn frequencies(&self) -> std::ops::RangeInclusive<i64> {
        let p = self.params();
        (-self.half_width).max(p.min_index())..=self.half_width.min(p.max_index())
    }

    pub fn values(&self) -> &GridFunction {
        &self.values
    }
}

/// Per-frequency growth `1 + ψ(x)²/n` of one explicit step.
#[derive(Debug, Clone)]
pub struct Propagator {
    growth: GridFunction,
}

impl Propagator {
    pub fn new(params: GridParams) -> Self {
        Self::from_symbols(&SpectralSymbols::new(params))
    }

    pub fn from_symbols(symbols: &SpectralSymbols) -> Self {
        let inv_n = symbols.params().dx();
        let growth = symbols.psi.map(|p| 1.0 + p * p * inv_n);
        Self { growth }
    }

    pub fn params(&self) -> GridParams {
        self.growth.params()
    }

    pub fn growth(&self) -> &GridFunction {
        &self.growth
    }

    /// `h(t,·) = growth^{⌊nt⌋}`. Far outside the stable band this overflows to infinity.
    pub fn power(&self, t: f64) -> GridFunction {
        self.power_steps(self.params().time_steps(t))
    }

    pub fn power_steps(&self, steps: u64) -> GridFunction {
        self.growth.map(|g| complex_powu(g, steps))
    }

    /// `max |growth(k/n)|` over `|k| ≤ ⌊radius·n⌋`.
    pub fn max_growth_within(&self, radius: f64) -> f64 {
        let p = self.params();
        let half = p.cell_of(radius);
        self.growth
            .iter_indexed()
            .filter(|(k, _)| k.abs() <= half)
            .map(|(_, g)| g.norm())
            .fold(0.0, nan_max)
    }
}

/// `|1 + ψ(x)²/n|² = 1 - 8n·sin²(θ/2)·cos θ + 16n²·sin⁴(θ/2)`, `θ = πx/n`.
pub fn growth_modulus_sq(n: f64, x: f64) -> f64 {
    let theta = std::f64::consts::PI * x / n;
    let s2 = (0.5 * theta).sin().powi(2);
    1.0 - 8.0 * n * s2 * theta.cos() + 16.0 * n * n * s2 * s2
}

/// Largest `|x|` with `|growth(x)| ≤ 1`: `(n/π)·arccos(n/(n+1))`.
///
/// `|growth|² ≤ 1` reduces to `cos θ ≥ n/(n+1)`. The familiar `√(2n)/π` is
/// the leading term of this radius and sits slightly outside it.
pub fn stable_radius(n: usize) -> f64 {
    let n = n as f64;
    n / std::f64::consts::PI * (n / (n + 1.0)).acos()
}

/// One explicit step `f + (1/n)·d_xx f`.
///
/// Interior rows read `j, j+1, j+2`; row `n²-2` uses the one-sided rule and
/// row `n²-1` is carried over unchanged.
pub fn step(slice: &GridFunction) -> GridFunction {
    let inv_n = slice.params().dx();
    slice + &(&d_xx(slice) * inv_n)
}

/// Stepper field with `f(0,·) = g`, defined for time indices `0..=steps`.
pub fn evolve(g: &GridFunction, steps: usize) -> Result<Field> {
    g.validate()?;
    let field = Field::recurrence(g.clone(), steps, step)?;
    for (i, slice) in field.slices().enumerate() {
        let max_modulus = slice.max_abs();
        if !(max_modulus <= OVERFLOW_LIMIT) {
            return Err(Error::Overflow {
                step: i,
                max_modulus,
                limit: OVERFLOW_LIMIT,
            });
        }
    }
    Ok(field)
}

/// The `f_corr` term of every pre-step slice `0..count` of `field`.
pub fn correction_sequence(field: &Field, count: usize) -> Vec<GridFunction> {
    let params = field.params();
    let phases = PhaseTable::new(params);
    let symbols = SpectralSymbols::new(params);
    field
        .slices()
        .take(count)
        .map(|s| BoundaryCorrections::with_tables(&s, &phases, &symbols).f_corr)
        .collect()
}

/// Transform of slice `i` in closed form:
/// `ĝ·G^i - (1/n)·Σ_{j<i} F_j·G^{i-j-1}` with `G = 1 + ψ²/n`.
///
/// `F_j` is the boundary correction of slice `j` before stepping. Without
/// corrections the result is `ĝ·G^i`, exact while the solution stays off the
/// rows `-n², -n²+1, n²-1`.
pub fn spectral_hat(
    g_hat: &GridFunction,
    corrections: Option<&[GridFunction]>,
    i: usize,
) -> Result<GridFunction> {
    let params = g_hat.params();
    if i >= params.time_count() {
        return Err(Error::IndexOutOfRange {
            what: "time",
            index: i as i64,
            min: 0,
            max: params.time_count() as i64 - 1,
        });
    }
    let growth = Propagator::new(params).growth;
    let mut out = g_hat.zip_with(&growth, |g, gr| g * complex_powu(gr, i as u64))?;
    if let Some(corr) = corrections {
        if corr.len() < i {
            return Err(Error::Precondition(format!(
                "need {i} correction slices, got {}",
                corr.len()
            )));
        }
        let inv_n = params.dx();
        for (j, f) in corr[..i].iter().enumerate() {
            let exponent = (i - j - 1) as u64;
            let term = f.zip_with(&growth, |f, gr| f * complex_powu(gr, exponent))?;
            out = &out - &(&term * inv_n);
        }
    }
    Ok(out)
}

/// Periodic convolution `(f*g)_j = (1/n)·Σ_k f_{(j-k) mod 2n²}·g_k`.
pub fn convolve(f: &GridFunction, g: &GridFunction) -> Result<GridFunction> {
    f.same_grid(g)?;
    let params = f.params();
    let support: Vec<(i64, Complex64)> = g.iter_indexed().filter(|(_, v)| *v != Complex64::new(0.0, 0.0)).collect();
    Ok(GridFunction::from_index_fn(params, |j| convolve_terms(f, &support, j)))
}

fn convolve_terms(f: &GridFunction, support: &[(i64, Complex64)], j: i64) -> Complex64 {
    let params = f.params();
    let mut acc = CompensatedSum::new();
    for &(k, v) in support {
        acc.add(f[params.wrap(j - k)] * v);
    }
    acc.total() * params.dx()
}

/// Residuals of `(f*g)^ = f̂·ĝ` and `(f*g)ˇ = f̌·ǧ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvolutionResiduals {
    pub forward: f64,
    pub inverse: f64,
}

pub fn check_convolution_theorem(f: &GridFunction, g: &GridFunction) -> Result<ConvolutionResiduals> {
    let conv = convolve(f, g)?;
    let forward = transform::forward(&conv)
        .max_abs_diff(&(&transform::forward(f) * &transform::forward(g)))?;
    let inverse = transform::inverse(&conv)
        .max_abs_diff(&(&transform::inverse(f) * &transform::inverse(g)))?;
    Ok(ConvolutionResiduals { forward, inverse })
}

/// Windowed heat kernel `Ψ(t, z) = (h(t,·)·W)ˇ(z)` at one time.
#[derive(Debug, Clone)]
pub struct HeatKernel {
    t: f64,
    window: Window,
    spectrum: GridFunction,
    phases: PhaseTable,
}

impl HeatKernel {
    pub fn new(t: f64, window: &Window) -> Result<Self> {
        let params = window.params();
        if !(t >= 0.0 && t < params.n() as f64) {
            return Err(Error::InvalidConfig(format!(
                "kernel time must lie in [0, {}), got {t}",
                params.n()
            )));
        }
        // outside the window the growth overflows; keep inf·0 from becoming NaN
        let steps = params.time_steps(t);
        let growth = Propagator::new(params).growth;
        let half = window.half_width();
        let spectrum = GridFunction::from_index_fn(params, |k| {
            if k.abs() <= half {
                0.5 * complex_powu(growth[k], steps)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Ok(Self {
            t,
            window: window.clone(),
            spectrum,
            phases: PhaseTable::new(params),
        })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// `h(t,·)·W` on the frequency grid.
    pub fn spectrum(&self) -> &GridFunction {
        &self.spectrum
    }

    /// Kernel at grid offset `z = m/n`, summed over the window only.
    pub fn at(&self, m: i64) -> Complex64 {
        let mut acc = CompensatedSum::new();
        for k in self.window.frequencies() {
            acc.add(self.spectrum[k] * self.phases.inverse(k * m));
        }
        acc.total() * self.window.params().dx()
    }

    /// Kernel at every grid offset, through the inverse transform.
    pub fn values(&self) -> GridFunction {
        transform::inverse(&self.spectrum)
    }
}

/// `Ψ_ω′(t, m/n)` for a single offset.
pub fn kernel(t: f64, m: i64, window: &Window) -> Result<Complex64> {
    let params = window.params();
    if !params.contains(m) {
        return Err(Error::IndexOutOfRange {
            what: "space",
            index: m,
            min: params.min_index(),
            max: params.max_index(),
        });
    }
    Ok(HeatKernel::new(t, window)?.at(m))
}

/// Inputs of the end-to-end solver.
#[derive(Debug, Clone)]
pub struct SolveConfig {
    pub n: usize,
    /// Boundary data is truncated to `[-omega, omega)`.
    pub omega: f64,
    /// Frequencies `|x| ≤ omega_prime` are kept.
    pub omega_prime: f64,
    pub boundary: BoundaryCondition,
    pub times: Vec<f64>,
    pub xs: Vec<f64>,
}

impl SolveConfig {
    /// Checks ranges and returns the grid.
    pub fn validate(&self) -> Result<GridParams> {
        let params = GridParams::new(self.n)?;
        let n = self.n as f64;
        if !(self.omega > 0.0 && self.omega < n) {
            return Err(Error::InvalidConfig(format!(
                "omega must lie in (0, {n}), got {}",
                self.omega
            )));
        }
        if !(self.omega_prime > 0.0 && self.omega_prime <= n) {
            return Err(Error::InvalidConfig(format!(
                "omega_prime must lie in (0, {n}], got {}",
                self.omega_prime
            )));
        }
        for &t in &self.times {
            if t.is_nan() || t <= 0.0 {
                return Err(Error::NonPositiveTime(t));
            }
            if t >= n {
                return Err(Error::InvalidConfig(format!("time {t} not below n = {n}")));
            }
        }
        for &x in &self.xs {
            if !(x >= -n && x < n) {
                return Err(Error::InvalidConfig(format!("position {x} outside [-{n}, {n})")));
            }
        }
        Ok(params)
    }

    /// Whether `ω < √ω′` and `ω′ < √(ln n)`, the sufficient regime for
    /// convergence to the classical solution.
    pub fn sufficient_regime(&self) -> bool {
        in_sufficiency_regime(self.n, self.omega, self.omega_prime)
    }
}

pub fn in_sufficiency_regime(n: usize, omega: f64, omega_prime: f64) -> bool {
    omega < omega_prime.sqrt() && omega_prime < (n as f64).ln().sqrt()
}

/// One solved point. `u.re` is the solution, `u.im` the phase residue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolvePoint {
    pub t: f64,
    pub x: f64,
    pub u: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutput {
    /// One point per `(t, x)`, times outer, positions inner.
    pub points: Vec<SolvePoint>,
    pub warnings: Vec<String>,
    pub sufficient_regime: bool,
}

/// Boundary data sampled on the cells of `[-ω, ω)`.
fn truncated_samples(params: GridParams, config: &SolveConfig) -> Vec<(i64, Complex64)> {
    let n = params.n() as f64;
    let lo = ((-config.omega * n).ceil() as i64).max(params.min_index());
    let hi = (((config.omega * n).ceil() as i64) - 1).min(params.max_index());
    (lo..=hi)
        .map(|j| (j, config.boundary.eval(params.coordinate(j))))
        .collect()
}

fn with_threads<T: Send>(threads: usize, job: impl FnOnce() -> T + Send) -> T {
    if threads <= 1 {
        return job();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(job),
        Err(_) => job(),
    }
}

/// Windowed spectral solve, single-threaded.
pub fn solve(config: &SolveConfig) -> Result<SolveOutput> {
    solve_with_threads(config, 1)
}

/// Windowed spectral solve.
///
/// Every output value is a sequential compensated sum, so results do not
/// depend on `threads`.
pub fn solve_with_threads(config: &SolveConfig, threads: usize) -> Result<SolveOutput> {
    let params = config.validate()?;
    let window = Window::new(params, config.omega_prime)?;
    let phases = PhaseTable::new(params);
    let propagator = Propagator::new(params);
    let samples = truncated_samples(params, config);
    let freqs: Vec<i64> = window.frequencies().collect();
    let dx = params.dx();

    let mut warnings = Vec::new();
    let max_growth = propagator.max_growth_within(config.omega_prime);
    if max_growth > 1.0 {
        let msg = format!(
            "growth factor reaches {max_growth:.6} inside the window (stable radius {:.4} < omega_prime {})",
            stable_radius(params.n()),
            config.omega_prime
        );
        warn!("{msg}");
        warnings.push(msg);
    }

    let points = with_threads(threads, || {
        let g_hat: Vec<Complex64> = freqs
            .par_iter()
            .map(|&k| {
                let mut acc = CompensatedSum::new();
                for &(j, v) in &samples {
                    acc.add(v * phases.kernel(j, k));
                }
                acc.total() * dx
            })
            .collect();

        let mut points = Vec::with_capacity(config.times.len() * config.xs.len());
        for &t in &config.times {
            let steps = params.time_steps(t).min(params.time_count() as u64 - 1);
            let weighted: Vec<Complex64> = freqs
                .iter()
                .zip(&g_hat)
                .map(|(&k, &gh)| 0.5 * complex_powu(propagator.growth()[k], steps) * gh)
                .collect();
            let row: Vec<SolvePoint> = config
                .xs
                .par_iter()
                .map(|&x| {
                    let m = params.cell_of(x);
                    let mut acc = CompensatedSum::new();
                    for (&k, &a) in freqs.iter().zip(&weighted) {
                        acc.add(a * phases.inverse(k * m));
                    }
                    SolvePoint {
                        t,
                        x,
                        u: acc.total() * dx,
                    }
                })
                .collect();
            points.extend(row);
        }
        points
    });

    Ok(SolveOutput {
        points,
        warnings,
        sufficient_regime: config.sufficient_regime(),
    })
}

/// Same answer as [`solve`], computed as `(h·W)ˇ * g_{n,ω}` with the whole
/// kernel materialized. Limited to `n ≤ CONVOLUTION_MAX_N`.
pub fn solve_via_convolution(config: &SolveConfig) -> Result<SolveOutput> {
    let params = config.validate()?;
    if params.n() > CONVOLUTION_MAX_N {
        return Err(Error::SizeGuard {
            operation: "solve_via_convolution",
            n: params.n(),
            limit: CONVOLUTION_MAX_N,
        });
    }
    let window = Window::new(params, config.omega_prime)?;
    let samples = truncated_samples(params, config);
    let mut points = Vec::with_capacity(config.times.len() * config.xs.len());
    for &t in &config.times {
        let kernel = HeatKernel::new(t, &window)?.values();
        for &x in &config.xs {
            let m = params.cell_of(x);
            points.push(SolvePoint {
                t,
                x,
                u: convolve_terms(&kernel, &samples, m),
            });
        }
    }
    Ok(SolveOutput {
        points,
        warnings: Vec::new(),
        sufficient_regime: config.sufficient_regime(),
    })
}
