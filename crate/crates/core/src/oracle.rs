//! Reference values: the classical Gaussian-kernel solution, boundary data,
//! the scalar sequences behind the kernel limit, and rate checks against
//! their error bounds.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use statrs::function::erf::erf;

use crate::error::{Error, Result};
use crate::evolution::{complex_powu, Propagator, Window};
use crate::grid::GridParams;
use crate::quadrature::{self, Quadrature};
use crate::sum::{nan_max, sum_real, CompensatedSum};
use crate::transform::{scaled_phase_step, PhaseTable};

/// Absolute tolerance of the reference quadrature.
pub const ORACLE_TOLERANCE: f64 = 1e-10;

const ORACLE_MAX_INTERVALS: usize = 20_000;

/// `|g(y)| ≤ a·e^{b|y|^rho}` with `rho < 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthCertificate {
    pub a: f64,
    pub b: f64,
    pub rho: f64,
}

impl GrowthCertificate {
    pub fn bound(&self, y: f64) -> f64 {
        self.a * (self.b * y.abs().powf(self.rho)).exp()
    }
}

/// Boundary data `g` of the heat equation.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryCondition {
    /// `amplitude·e^{-rate·y²}`
    Gaussian { amplitude: f64, rate: f64 },
    /// `1` on `[left, right]`, else `0`.
    Indicator { left: f64, right: f64 },
    /// `e^{1 - 1/(1-r²)}` for `r = |y-center|/width < 1`, else `0`.
    Bump { center: f64, width: f64 },
    /// Nearest sample inside `[x_first, x_last]`, zero outside. Sorted by `x`.
    Sampled { points: Vec<(f64, Complex64)> },
}

impl BoundaryCondition {
    pub fn gaussian(amplitude: f64, rate: f64) -> Result<Self> {
        if !(amplitude.is_finite() && rate.is_finite() && rate > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "gaussian needs finite amplitude and rate > 0, got ({amplitude}, {rate})"
            )));
        }
        Ok(Self::Gaussian { amplitude, rate })
    }

    pub fn indicator(left: f64, right: f64) -> Result<Self> {
        if !(left.is_finite() && right.is_finite() && left < right) {
            return Err(Error::InvalidConfig(format!(
                "indicator needs left < right, got ({left}, {right})"
            )));
        }
        Ok(Self::Indicator { left, right })
    }

    pub fn bump(center: f64, width: f64) -> Result<Self> {
        if !(center.is_finite() && width.is_finite() && width > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "bump needs width > 0, got ({center}, {width})"
            )));
        }
        Ok(Self::Bump { center, width })
    }

    pub fn sampled(mut points: Vec<(f64, Complex64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidConfig("sampled boundary has no points".into()));
        }
        if let Some((x, v)) = points
            .iter()
            .find(|(x, v)| !(x.is_finite() && v.re.is_finite() && v.im.is_finite()))
        {
            return Err(Error::InvalidConfig(format!("non-finite sample ({x}, {v})")));
        }
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(Self::Sampled { points })
    }

    /// Parses `name` or `name:p1,p2`. Names: `gaussian`, `indicator`, `bump`, `zero`.
    pub fn parse(spec: &str) -> Result<Self> {
        let (name, args) = match spec.split_once(':') {
            Some((name, args)) => (name.trim(), Some(args)),
            None => (spec.trim(), None),
        };
        let params: Vec<f64> = match args {
            Some(args) => args
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::InvalidConfig(format!("bad boundary parameter '{s}'")))
                })
                .collect::<Result<_>>()?,
            None => Vec::new(),
        };
        let two = |default: (f64, f64)| -> Result<(f64, f64)> {
            match params.as_slice() {
                [] => Ok(default),
                [a, b] => Ok((*a, *b)),
                _ => Err(Error::InvalidConfig(format!(
                    "boundary '{name}' takes two parameters, got {}",
                    params.len()
                ))),
            }
        };
        match name {
            "gaussian" => {
                let (a, b) = two((1.0, 1.0))?;
                Self::gaussian(a, b)
            }
            "indicator" => {
                let (l, r) = two((-1.0, 1.0))?;
                Self::indicator(l, r)
            }
            "bump" => {
                let (c, w) = two((0.0, 1.0))?;
                Self::bump(c, w)
            }
            "zero" if params.is_empty() => Self::gaussian(0.0, 1.0),
            _ => Err(Error::InvalidConfig(format!("unknown boundary '{spec}'"))),
        }
    }

    pub fn eval(&self, y: f64) -> Complex64 {
        let re = match self {
            Self::Gaussian { amplitude, rate } => amplitude * (-rate * y * y).exp(),
            Self::Indicator { left, right } => {
                if *left <= y && y <= *right {
                    1.0
                } else {
                    0.0
                }
            }
            Self::Bump { center, width } => {
                let r = (y - center) / width;
                if r.abs() < 1.0 {
                    (1.0 - 1.0 / (1.0 - r * r)).exp()
                } else {
                    0.0
                }
            }
            Self::Sampled { points } => return nearest_sample(points, y),
        };
        Complex64::new(re, 0.0)
    }

    pub fn certificate(&self) -> GrowthCertificate {
        let a = match self {
            Self::Gaussian { amplitude, .. } => amplitude.abs(),
            Self::Indicator { .. } | Self::Bump { .. } => 1.0,
            Self::Sampled { points } => points.iter().map(|(_, v)| v.norm()).fold(0.0, nan_max),
        };
        GrowthCertificate { a, b: 0.0, rho: 0.0 }
    }

    /// Whether the certificate bounds `|g|` at every `y` in `ys`.
    pub fn check_certificate(&self, ys: impl IntoIterator<Item = f64>) -> bool {
        let cert = self.certificate();
        ys.into_iter()
            .all(|y| self.eval(y).norm() <= cert.bound(y) * (1.0 + 1e-12))
    }

    /// Closed interval outside of which `g` vanishes, if any.
    pub fn support(&self) -> Option<(f64, f64)> {
        match self {
            Self::Gaussian { amplitude, .. } if *amplitude == 0.0 => Some((0.0, 0.0)),
            Self::Gaussian { .. } => None,
            Self::Indicator { left, right } => Some((*left, *right)),
            Self::Bump { center, width } => Some((center - width, center + width)),
            Self::Sampled { points } => Some((points[0].0, points[points.len() - 1].0)),
        }
    }

    /// Points where `g` jumps.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Self::Indicator { left, right } => vec![*left, *right],
            Self::Sampled { points } => {
                let mut out = vec![points[0].0];
                out.extend(points.windows(2).map(|w| 0.5 * (w[0].0 + w[1].0)));
                out.push(points[points.len() - 1].0);
                out
            }
            _ => Vec::new(),
        }
    }

    pub fn is_continuous(&self) -> bool {
        matches!(self, Self::Gaussian { .. } | Self::Bump { .. })
    }

    /// `H(t, x)` in closed form where one is known.
    pub fn closed_form(&self, t: f64, x: f64) -> Option<Complex64> {
        let re = match self {
            Self::Gaussian { amplitude, rate } => {
                let s = 1.0 + 4.0 * rate * t;
                amplitude / s.sqrt() * (-rate * x * x / s).exp()
            }
            Self::Indicator { left, right } => {
                let w = 2.0 * t.sqrt();
                0.5 * (erf((x - left) / w) - erf((x - right) / w))
            }
            _ => return None,
        };
        Some(Complex64::new(re, 0.0))
    }

    /// `∫ g(y) dy`, where it is known exactly.
    pub fn mass(&self) -> Option<f64> {
        match self {
            Self::Gaussian { amplitude, rate } => Some(amplitude * (PI / rate).sqrt()),
            Self::Indicator { left, right } => Some(right - left),
            _ => None,
        }
    }
}

fn nearest_sample(points: &[(f64, Complex64)], y: f64) -> Complex64 {
    let (first, last) = (points[0].0, points[points.len() - 1].0);
    if !(first <= y && y <= last) {
        return Complex64::new(0.0, 0.0);
    }
    let i = points.partition_point(|(x, _)| *x < y);
    if i == 0 {
        return points[0].1;
    }
    if i == points.len() {
        return points[i - 1].1;
    }
    let (lo, hi) = (points[i - 1], points[i]);
    if y - lo.0 < hi.0 - y {
        lo.1
    } else {
        hi.1
    }
}

fn heat_kernel_1d(t: f64, d: f64) -> f64 {
    (-d * d / (4.0 * t)).exp() / (4.0 * PI * t).sqrt()
}

/// Half-width of the integration window around `x`.
fn window_radius(cert: &GrowthCertificate, t: f64, x: f64) -> f64 {
    let mut r = 10.0 * t.sqrt();
    let tail = |r: f64| cert.bound(x.abs() + r) * heat_kernel_1d(t, r);
    while tail(r) >= 1e-14 && r < 1e6 {
        r *= 1.25;
    }
    r
}

/// `H(t,x) = (4πt)^{-1/2}·∫ e^{-(x-y)²/4t}·g(y) dy` by adaptive quadrature.
pub fn classical_solution(g: &BoundaryCondition, t: f64, x: f64) -> Result<Complex64> {
    if t.is_nan() || t <= 0.0 {
        return Err(Error::NonPositiveTime(t));
    }
    let r = window_radius(&g.certificate(), t, x);
    let (mut lo, mut hi) = (x - r, x + r);
    if let Some((a, b)) = g.support() {
        lo = lo.max(a);
        hi = hi.min(b);
    }
    if lo >= hi {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let mut points = vec![lo];
    points.extend(g.breakpoints().into_iter().filter(|&p| lo < p && p < hi));
    points.push(hi);
    let q = quadrature::integrate_pieces(
        |y| g.eval(y) * heat_kernel_1d(t, x - y),
        &points,
        ORACLE_TOLERANCE,
        ORACLE_MAX_INTERVALS,
    )?;
    Ok(q.value)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformIdentity {
    pub quadrature: Quadrature,
    /// `(πt)^{-1/2}·e^{-z²/4t}`
    pub closed_form: f64,
    pub residual: f64,
}

/// `∫ e^{iπwz - π²tw²} dw` against `(πt)^{-1/2}·e^{-z²/4t}`.
pub fn gaussian_transform_identity(t: f64, z: f64) -> Result<TransformIdentity> {
    if t.is_nan() || t <= 0.0 {
        return Err(Error::NonPositiveTime(t));
    }
    // e^{-π²tW²} = e^{-50}
    let w = (50.0 / (PI * PI * t)).sqrt();
    let quadrature = quadrature::integrate(
        |w| Complex64::new(-PI * PI * t * w * w, PI * w * z).exp(),
        -w,
        w,
        1e-12,
        ORACLE_MAX_INTERVALS,
    )?;
    let closed_form = (-z * z / (4.0 * t)).exp() / (PI * t).sqrt();
    Ok(TransformIdentity {
        quadrature,
        closed_form,
        residual: (quadrature.value - closed_form).norm(),
    })
}

/// Scalar sequences whose limits give the kernel's Gaussian symbol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SequenceFamily {
    pub n: u64,
}

impl SequenceFamily {
    pub fn new(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidConfig("sequence index must be ≥ 1".into()));
        }
        Ok(Self { n })
    }

    /// `s_n(y) = n(e^{iπy/n} - 1)`
    pub fn s(&self, y: f64) -> Complex64 {
        scaled_phase_step(self.n as f64, y)
    }

    /// `r_n(w) = (1 + w/n)^n`
    pub fn r(&self, w: Complex64) -> Complex64 {
        complex_powu(1.0 + w / self.n as f64, self.n)
    }

    /// `t_n(y) = r_n(s_n(y)²)`
    pub fn t(&self, y: f64) -> Complex64 {
        let s = self.s(y);
        self.r(s * s)
    }

    /// `p_n = s_n(1) - iπ`
    pub fn p(&self) -> Complex64 {
        self.s(1.0) - Complex64::new(0.0, PI)
    }

    /// `v_n(y, t) = t_n(y)^t - e^{-π²ty²}`, principal branch.
    pub fn v(&self, y: f64, t: f64) -> Complex64 {
        let tn = self.t(y);
        let power = if tn == Complex64::new(0.0, 0.0) {
            tn
        } else {
            (tn.ln() * t).exp()
        };
        power - (-PI * PI * t * y * y).exp()
    }

    /// `b_n(y) = t_n(y) - e^{-π²y²}`
    pub fn b(&self, y: f64) -> Complex64 {
        self.t(y) - (-PI * PI * y * y).exp()
    }

    /// `q_n(w) = r_n(w) - e^w`
    pub fn q(&self, w: Complex64) -> Complex64 {
        self.r(w) - w.exp()
    }
}

/// Negated log-log least-squares slope: errors `∝ param^{-order}`.
pub fn fit_order(params: &[f64], errors: &[f64]) -> Option<f64> {
    if params.len() != errors.len() || params.len() < 2 {
        return None;
    }
    let pts: Vec<(f64, f64)> = params
        .iter()
        .zip(errors)
        .filter(|(p, e)| **p > 0.0 && **e > 0.0 && e.is_finite())
        .map(|(p, e)| (p.ln(), e.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let mx = sum_real(pts.iter().map(|p| p.0)) / m;
    let my = sum_real(pts.iter().map(|p| p.1)) / m;
    let sxy = sum_real(pts.iter().map(|p| (p.0 - mx) * (p.1 - my)));
    let sxx = sum_real(pts.iter().map(|p| (p.0 - mx).powi(2)));
    if sxx == 0.0 {
        return None;
    }
    Some(-sxy / sxx)
}

fn strictly_decreasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] < w[0])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PBoundRow {
    pub n: u64,
    pub modulus: f64,
    /// `π²e^π/n`
    pub bound: f64,
}

impl PBoundRow {
    pub fn holds(&self) -> bool {
        self.modulus <= self.bound
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PBoundReport {
    pub rows: Vec<PBoundRow>,
    pub order: Option<f64>,
}

impl PBoundReport {
    pub fn bounds_hold(&self) -> bool {
        self.rows.iter().all(PBoundRow::holds)
    }
}

/// `|p_n| ≤ π²e^π/n` for each `n`, and the fitted decay order of `|p_n|`.
pub fn rate_check_p(n_values: &[u64]) -> Result<PBoundReport> {
    let rows: Vec<PBoundRow> = n_values
        .par_iter()
        .map(|&n| {
            let seq = SequenceFamily::new(n)?;
            Ok(PBoundRow {
                n,
                modulus: seq.p().norm(),
                bound: PI * PI * PI.exp() / n as f64,
            })
        })
        .collect::<Result<_>>()?;
    let ns: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let ms: Vec<f64> = rows.iter().map(|r| r.modulus).collect();
    Ok(PBoundReport {
        order: fit_order(&ns, &ms),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TRateReport {
    pub y: f64,
    pub n_values: Vec<u64>,
    /// `|t_n(y) - e^{-π²y²}|` per `n`
    pub residuals: Vec<f64>,
    /// `|t_n(y)|` per `n`
    pub moduli: Vec<f64>,
    pub order: Option<f64>,
}

impl TRateReport {
    pub fn decreasing(&self) -> bool {
        strictly_decreasing(&self.residuals)
    }
}

/// Decay of `t_n(y) - e^{-π²y²}` in `n` for each `y`.
pub fn rate_check_t(y_values: &[f64], n_values: &[u64]) -> Result<Vec<TRateReport>> {
    y_values
        .iter()
        .map(|&y| {
            if y == 0.0 || !y.is_finite() {
                return Err(Error::Precondition(format!("rate check needs finite y ≠ 0, got {y}")));
            }
            let values: Vec<Complex64> = n_values
                .par_iter()
                .map(|&n| SequenceFamily::new(n).map(|s| s.t(y)))
                .collect::<Result<_>>()?;
            let limit = (-PI * PI * y * y).exp();
            let residuals: Vec<f64> = values.iter().map(|v| (v - limit).norm()).collect();
            let ns: Vec<f64> = n_values.iter().map(|&n| n as f64).collect();
            Ok(TRateReport {
                y,
                n_values: n_values.to_vec(),
                order: fit_order(&ns, &residuals),
                moduli: values.iter().map(|v| v.norm()).collect(),
                residuals,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailBound {
    /// `(1/n)·Σ_{|x| ≥ threshold} e^{-π²tx²}` over the grid
    pub sum: f64,
    /// `(1/(π√t))·e^{-π²t·threshold²}`
    pub bound: f64,
}

impl TailBound {
    pub fn holds(&self) -> bool {
        self.sum <= self.bound
    }
}

/// Grid tail of the Gaussian symbol beyond `threshold` against its bound.
pub fn tail_bound_check(t: f64, threshold: f64, n: usize) -> Result<TailBound> {
    if t.is_nan() || t <= 0.0 {
        return Err(Error::NonPositiveTime(t));
    }
    let min = 1.0 / (PI * t.sqrt());
    if !(threshold >= min) {
        return Err(Error::Precondition(format!(
            "threshold {threshold} below 1/(π√t) = {min}"
        )));
    }
    let params = GridParams::new(n)?;
    let sum = sum_real(
        params
            .indices()
            .map(|j| params.coordinate(j))
            .filter(|x| x.abs() >= threshold)
            .map(|x| (-PI * PI * t * x * x).exp()),
    ) * params.dx();
    Ok(TailBound {
        sum,
        bound: (-PI * PI * t * threshold * threshold).exp() / (PI * t.sqrt()),
    })
}

/// Frequency radius used by [`quadrature_rate_check`].
pub const RATE_CHECK_RADIUS: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureRateRow {
    pub n: usize,
    /// `|(1/n)·Σ_{|k| ≤ 3n} h_k·e^{iπkz/n} - (πt)^{-1/2}e^{-z²/4t}|`
    pub propagator_error: f64,
    /// Same with `h` replaced by `e^{-π²tx²}`, summed over the whole grid.
    pub gaussian_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRateReport {
    pub t: f64,
    pub z: f64,
    pub rows: Vec<QuadratureRateRow>,
    pub order: Option<f64>,
}

impl QuadratureRateReport {
    pub fn decreasing(&self) -> bool {
        let errs: Vec<f64> = self.rows.iter().map(|r| r.propagator_error).collect();
        strictly_decreasing(&errs)
    }
}

/// Riemann sums of `∫ h(t,w)·e^{iπwz} dw` on successive grids.
///
/// The propagator symbol `h = (1 + ψ²/n)^{⌊nt⌋}` differs from `e^{-π²tw²}`
/// by `O(1/n)`, which sets the observed order. The exact Gaussian's sum is
/// reported alongside; it converges spectrally fast.
pub fn quadrature_rate_check(t: f64, z: f64, n_values: &[usize]) -> Result<QuadratureRateReport> {
    if t.is_nan() || t <= 0.0 {
        return Err(Error::NonPositiveTime(t));
    }
    let target = (-z * z / (4.0 * t)).exp() / (PI * t).sqrt();
    let rows: Vec<QuadratureRateRow> = n_values
        .par_iter()
        .map(|&n| {
            let params = GridParams::new(n)?;
            let m = (z * n as f64).round();
            if (m - z * n as f64).abs() > 1e-9 * (1.0 + m.abs()) || !params.contains(m as i64) {
                return Err(Error::Precondition(format!("z = {z} is not on the grid at n = {n}")));
            }
            let m = m as i64;
            let phases = PhaseTable::new(params);
            let window = Window::new(params, RATE_CHECK_RADIUS.min(n as f64))?;
            let h = Propagator::new(params).power(t);
            let mut disc = CompensatedSum::new();
            for k in window.frequencies() {
                disc.add(h[k] * phases.inverse(k * m));
            }
            let mut gauss = CompensatedSum::new();
            for k in params.indices() {
                let w = params.coordinate(k);
                gauss.add((-PI * PI * t * w * w).exp() * phases.inverse(k * m));
            }
            Ok(QuadratureRateRow {
                n,
                propagator_error: (disc.total() * params.dx() - target).norm(),
                gaussian_error: (gauss.total() * params.dx() - target).norm(),
            })
        })
        .collect::<Result<_>>()?;
    let ns: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let errs: Vec<f64> = rows.iter().map(|r| r.propagator_error).collect();
    Ok(QuadratureRateReport {
        t,
        z,
        order: fit_order(&ns, &errs),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gauss() -> BoundaryCondition {
        BoundaryCondition::gaussian(1.0, 1.0).unwrap()
    }

    #[test]
    fn parse_names() {
        assert_eq!(BoundaryCondition::parse("gaussian").unwrap(), gauss());
        assert_eq!(
            BoundaryCondition::parse("indicator:-0.5, 2").unwrap(),
            BoundaryCondition::Indicator { left: -0.5, right: 2.0 }
        );
        assert_eq!(
            BoundaryCondition::parse("zero").unwrap().eval(0.0),
            Complex64::new(0.0, 0.0)
        );
        assert!(BoundaryCondition::parse("bump:1").is_err());
        assert!(BoundaryCondition::parse("triangle:1,2").is_err());
        assert!(BoundaryCondition::parse("gaussian:1,x").is_err());
        assert!(BoundaryCondition::parse("indicator:2,1").is_err());
    }

    #[test]
    fn eval_kinds() {
        let b = BoundaryCondition::bump(0.0, 2.0).unwrap();
        assert_eq!(b.eval(0.0).re, 1.0);
        assert_eq!(b.eval(2.0).re, 0.0);
        assert!(b.eval(1.9).re > 0.0);
        let s = BoundaryCondition::sampled(vec![
            (1.0, Complex64::new(3.0, 0.0)),
            (0.0, Complex64::new(1.0, 1.0)),
        ])
        .unwrap();
        assert_eq!(s.eval(0.2), Complex64::new(1.0, 1.0));
        assert_eq!(s.eval(0.8).re, 3.0);
        assert_eq!(s.eval(1.5).re, 0.0);
        assert_eq!(s.eval(-0.1).re, 0.0);
    }

    #[test]
    fn certificates_hold() {
        let ys: Vec<f64> = (-400..=400).map(|i| i as f64 * 0.0137).collect();
        for g in [
            gauss(),
            BoundaryCondition::gaussian(-2.5, 0.3).unwrap(),
            BoundaryCondition::indicator(-1.0, 0.5).unwrap(),
            BoundaryCondition::bump(0.3, 1.2).unwrap(),
        ] {
            assert!(g.check_certificate(ys.iter().copied()), "{g:?}");
            assert!(g.certificate().rho < 2.0);
        }
    }

    #[test]
    fn closed_form_value() {
        let h = classical_solution(&gauss(), 0.5, 0.0).unwrap();
        assert!((h.re - 1.0 / 3f64.sqrt()).abs() <= 1e-9);
        assert!((gauss().closed_form(0.5, 0.0).unwrap().re - 0.577_350_269_189_625_8).abs() < 1e-15);
    }

    #[test]
    fn closed_forms_match_quadrature_on_lattice() {
        for g in [gauss(), BoundaryCondition::indicator(-1.0, 0.5).unwrap()] {
            for t in [0.1, 0.5, 1.0, 2.0] {
                for x in [-2.0, -0.7, 0.0, 0.4, 1.5] {
                    let q = classical_solution(&g, t, x).unwrap();
                    let c = g.closed_form(t, x).unwrap();
                    assert!((q - c).norm() <= 1e-9, "{g:?} t={t} x={x}: {q} vs {c}");
                }
            }
        }
    }

    #[test]
    fn small_time_recovers_boundary() {
        for x in [-1.0, 0.0, 1.0] {
            let h = classical_solution(&gauss(), 1e-6, x).unwrap();
            assert!((h - gauss().eval(x)).norm() <= 1e-3);
        }
    }

    #[test]
    fn mass_is_conserved() {
        let g = gauss();
        for t in [0.25, 1.0] {
            let q = quadrature::integrate(
                |x| classical_solution(&g, t, x).unwrap(),
                -12.0,
                12.0,
                1e-9,
                2000,
            )
            .unwrap();
            let mass = g.mass().unwrap();
            assert!((q.value.re - mass).abs() <= 1e-6 * mass, "t={t}");
        }
    }

    #[test]
    fn satisfies_heat_equation() {
        let g = gauss();
        let h = 1e-3;
        let u = |t: f64, x: f64| classical_solution(&g, t, x).unwrap().re;
        for x in [-1.0, -0.5, 0.0, 0.5, 1.0] {
            let t = 0.5;
            let ut = (u(t + h, x) - u(t - h, x)) / (2.0 * h);
            let uxx = (u(t, x + h) - 2.0 * u(t, x) + u(t, x - h)) / (h * h);
            assert!((ut - uxx).abs() <= 1e-4, "x={x}: {ut} vs {uxx}");
        }
    }

    #[test]
    fn classical_rejects_bad_time() {
        assert_eq!(classical_solution(&gauss(), 0.0, 0.0), Err(Error::NonPositiveTime(0.0)));
    }

    #[test]
    fn transform_identity() {
        let r = gaussian_transform_identity(1.0, 0.0).unwrap();
        assert!((r.quadrature.value.re - 1.0 / PI.sqrt()).abs() <= 1e-10);
        assert!(r.quadrature.value.im.abs() <= 1e-10);
        let r = gaussian_transform_identity(0.5, 1.0).unwrap();
        assert!(r.residual <= 1e-8);
    }

    #[test]
    fn sequence_examples() {
        for n in [1, 7, 1000] {
            assert_eq!(SequenceFamily::new(n).unwrap().t(0.0), Complex64::new(1.0, 0.0));
        }
        let p1 = SequenceFamily::new(1).unwrap().p();
        assert!((p1 - Complex64::new(-2.0, -PI)).norm() <= 1e-15);
        assert!((p1.norm() - (4.0 + PI * PI).sqrt()).abs() <= 1e-14);
        let s = SequenceFamily::new(1_000_000).unwrap();
        assert!((s.s(1.0) - Complex64::new(0.0, PI)).norm() < 1e-4);
        assert!(s.q(Complex64::new(-1.0, 0.5)).norm() < 1e-5);
        assert!(s.b(0.5).norm() < 1e-4);
        assert!(s.v(0.5, 0.3).norm() < 1e-4);
        assert!(SequenceFamily::new(0).is_err());
    }

    #[test]
    fn fit_order_recovers_slope() {
        let ns = [10.0, 100.0, 1000.0];
        let errs: Vec<f64> = ns.iter().map(|n: &f64| 3.0 / n.powf(1.5)).collect();
        assert!((fit_order(&ns, &errs).unwrap() - 1.5).abs() < 1e-12);
        assert!(fit_order(&[1.0], &[1.0]).is_none());
    }

    #[test]
    fn p_bound_examples() {
        let r = rate_check_p(&[1, 1_000_000]).unwrap();
        assert!(r.bounds_hold());
        assert!(r.rows[1].bound <= 2.29e-4 && r.rows[1].modulus <= 2.29e-4);
    }

    #[test]
    fn t_rate_examples() {
        let r = rate_check_t(&[1.0, 5.0], &[100, 1000, 10_000]).unwrap();
        assert!(r[0].decreasing());
        let order = r[0].order.unwrap();
        assert!((0.8..=1.2).contains(&order), "order {order}");
        assert!(r[1].moduli[2] <= 1e-3);
        assert!(rate_check_t(&[0.0], &[10]).is_err());
    }

    #[test]
    fn tail_bound_examples() {
        let a = tail_bound_check(1.0, 1.0, 100).unwrap();
        assert!(a.holds() && (a.bound - (-PI * PI).exp() / PI).abs() < 1e-18);
        assert!(tail_bound_check(0.25, 2.0, 100).unwrap().holds());
        assert!(matches!(tail_bound_check(1.0, 0.2, 100), Err(Error::Precondition(_))));
    }

    #[test]
    fn quadrature_rate_examples() {
        let r = quadrature_rate_check(1.0, 0.0, &[64, 128, 256]).unwrap();
        assert!(r.decreasing());
        let order = r.order.unwrap();
        assert!((0.8..=1.5).contains(&order), "order {order}");
        let r = quadrature_rate_check(1.0, 1.0, &[256]).unwrap();
        assert!(r.rows[0].propagator_error <= 1e-2);
        assert!(r.rows[0].gaussian_error <= 1e-12);
        assert!(quadrature_rate_check(1.0, 0.001, &[64]).is_err());
    }
}
