//! Finite space/time grids, grid functions and forward-difference calculus.
//!
//! At grid parameter `n` the space grid is `{j/n : -n² ≤ j ≤ n²-1}`, covering
//! `[-n, n)`, and the time grid is `{i/n : 0 ≤ i ≤ n²-1}`, covering `[0, n)`.
//! A value stored at space index `j` stands for the constant value on the cell
//! `[j/n, (j+1)/n)`. Integration is the `1/n`-weighted sum over all cells.

use std::fmt;
use std::ops::{Add, Index, Mul, Sub};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sum::{nan_max, sum_complex};

/// Largest grid parameter accepted; `2n²` values per slice must stay in memory.
pub const MAX_GRID_PARAM: usize = 4096;

/// The grid parameter `n` and everything derived from it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridParams {
    n: usize,
}

impl GridParams {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_GRID_PARAM {
            return Err(Error::InvalidGrid {
                n,
                max: MAX_GRID_PARAM,
            });
        }
        Ok(Self { n })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// `n²`, the number of non-negative space indices (and of time indices).
    #[inline]
    pub fn n_squared(&self) -> i64 {
        (self.n * self.n) as i64
    }

    /// Number of space points, `2n²`.
    #[inline]
    pub fn space_count(&self) -> usize {
        2 * self.n * self.n
    }

    /// Number of time points, `n²`.
    #[inline]
    pub fn time_count(&self) -> usize {
        self.n * self.n
    }

    /// Grid spacing `1/n`; also the time step and the integration weight.
    #[inline]
    pub fn dx(&self) -> f64 {
        1.0 / self.n as f64
    }

    #[inline]
    pub fn min_index(&self) -> i64 {
        -self.n_squared()
    }

    #[inline]
    pub fn max_index(&self) -> i64 {
        self.n_squared() - 1
    }

    /// All space indices in increasing order.
    pub fn indices(&self) -> std::ops::RangeInclusive<i64> {
        self.min_index()..=self.max_index()
    }

    #[inline]
    pub fn coordinate(&self, j: i64) -> f64 {
        j as f64 / self.n as f64
    }

    #[inline]
    pub fn contains(&self, j: i64) -> bool {
        j >= self.min_index() && j <= self.max_index()
    }

    /// Storage offset of space index `j`. Caller guarantees `contains(j)`.
    #[inline]
    pub fn offset(&self, j: i64) -> usize {
        debug_assert!(self.contains(j));
        (j + self.n_squared()) as usize
    }

    /// Space index stored at `offset`.
    #[inline]
    pub fn index_at(&self, offset: usize) -> i64 {
        offset as i64 - self.n_squared()
    }

    /// Maps any integer onto the index range, periodically with period `2n²`.
    #[inline]
    pub fn wrap(&self, j: i64) -> i64 {
        let period = 2 * self.n_squared();
        (j - self.min_index()).rem_euclid(period) + self.min_index()
    }

    /// Index of the cell containing `x`, i.e. `⌊n·x⌋`.
    ///
    /// A relative guard of a few ulps keeps products such as `0.3·10` from
    /// landing one cell low.
    pub fn cell_of(&self, x: f64) -> i64 {
        floor_guarded(x * self.n as f64)
    }

    /// Number of explicit time steps `⌊n·t⌋` elapsed at time `t`.
    pub fn time_steps(&self, t: f64) -> u64 {
        floor_guarded(t * self.n as f64).max(0) as u64
    }

    fn check_time_index(&self, i: usize) -> Result<()> {
        if i >= self.time_count() {
            return Err(Error::IndexOutOfRange {
                what: "time",
                index: i as i64,
                min: 0,
                max: self.time_count() as i64 - 1,
            });
        }
        Ok(())
    }
}

impl fmt::Display for GridParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={}", self.n)
    }
}

fn floor_guarded(v: f64) -> i64 {
    let nudged = v + 4.0 * f64::EPSILON * v.abs().max(1.0);
    nudged.floor() as i64
}

/// A complex-valued function on the `2n²` space points of one time slice.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    params: GridParams,
    values: Vec<Complex64>,
}

impl GridFunction {
    /// Wraps values ordered by increasing space index.
    pub fn new(params: GridParams, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != params.space_count() {
            return Err(Error::LengthMismatch {
                expected: params.space_count(),
                found: values.len(),
            });
        }
        Ok(Self { params, values })
    }

    pub fn zeros(params: GridParams) -> Self {
        Self::constant(params, Complex64::new(0.0, 0.0))
    }

    pub fn constant(params: GridParams, c: Complex64) -> Self {
        Self {
            params,
            values: vec![c; params.space_count()],
        }
    }

    /// Samples `f` at the grid coordinates `j/n`.
    pub fn from_fn(params: GridParams, mut f: impl FnMut(f64) -> Complex64) -> Self {
        Self::from_index_fn(params, |j| f(params.coordinate(j)))
    }

    pub fn from_index_fn(params: GridParams, f: impl FnMut(i64) -> Complex64) -> Self {
        Self {
            params,
            values: params.indices().map(f).collect(),
        }
    }

    /// Value `value` at index `j`, zero elsewhere.
    pub fn impulse(params: GridParams, j: i64, value: Complex64) -> Result<Self> {
        if !params.contains(j) {
            return Err(Error::IndexOutOfRange {
                what: "space",
                index: j,
                min: params.min_index(),
                max: params.max_index(),
            });
        }
        let mut out = Self::zeros(params);
        out.values[params.offset(j)] = value;
        Ok(out)
    }

    #[inline]
    pub fn params(&self) -> GridParams {
        self.params
    }

    #[inline]
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    #[inline]
    pub fn get(&self, j: i64) -> Option<Complex64> {
        self.params
            .contains(j)
            .then(|| self.values[self.params.offset(j)])
    }

    /// `(j, value)` pairs in increasing `j`.
    pub fn iter_indexed(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.params.indices().zip(self.values.iter().copied())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, nan_max)
    }

    /// Fails on the first NaN or infinite value.
    pub fn validate(&self) -> Result<()> {
        match self
            .iter_indexed()
            .find(|(_, z)| !(z.re.is_finite() && z.im.is_finite()))
        {
            Some((index, _)) => Err(Error::NonFinite { index }),
            None => Ok(()),
        }
    }

    pub fn map(&self, mut f: impl FnMut(Complex64) -> Complex64) -> Self {
        Self {
            params: self.params,
            values: self.values.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn zip_with(
        &self,
        other: &GridFunction,
        mut f: impl FnMut(Complex64, Complex64) -> Complex64,
    ) -> Result<Self> {
        self.same_grid(other)?;
        Ok(Self {
            params: self.params,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn same_grid(&self, other: &GridFunction) -> Result<()> {
        if self.params != other.params {
            return Err(Error::GridMismatch {
                left: self.params.n(),
                right: other.params.n(),
            });
        }
        Ok(())
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|z| z * c)
    }

    /// `max_j |self_j - other_j|`.
    pub fn max_abs_diff(&self, other: &GridFunction) -> Result<f64> {
        self.same_grid(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, nan_max))
    }
}

impl Index<i64> for GridFunction {
    type Output = Complex64;

    fn index(&self, j: i64) -> &Complex64 {
        assert!(
            self.params.contains(j),
            "space index {j} outside grid {}",
            self.params
        );
        &self.values[self.params.offset(j)]
    }
}

// Binary operators panic on mismatched grids, like shape mismatches in
// array libraries; use `zip_with` for a fallible variant.
macro_rules! pointwise_op {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&GridFunction> for &GridFunction {
            type Output = GridFunction;

            fn $method(self, rhs: &GridFunction) -> GridFunction {
                self.zip_with(rhs, |a, b| a $op b)
                    .expect("pointwise operation on mismatched grids")
            }
        }
    };
}

pointwise_op!(Add, add, +);
pointwise_op!(Sub, sub, -);
pointwise_op!(Mul, mul, *);

impl Mul<Complex64> for &GridFunction {
    type Output = GridFunction;

    fn mul(self, c: Complex64) -> GridFunction {
        self.scale(c)
    }
}

impl Mul<f64> for &GridFunction {
    type Output = GridFunction;

    fn mul(self, c: f64) -> GridFunction {
        self.map(|z| z * c)
    }
}

/// `(1/n)·Σ_j f(j/n)` over all `2n²` points.
pub fn integrate(f: &GridFunction) -> Complex64 {
    sum_complex(f.values.iter().copied()) * f.params.dx()
}

/// Forward difference in space: `n·(f_{j+1} - f_j)`, forced to 0 at the top index.
pub fn d_x(f: &GridFunction) -> GridFunction {
    let n = f.params.n() as f64;
    let v = &f.values;
    let mut out = Vec::with_capacity(v.len());
    out.extend(v.windows(2).map(|w| (w[1] - w[0]) * n));
    out.push(Complex64::new(0.0, 0.0));
    GridFunction {
        params: f.params,
        values: out,
    }
}

/// Second difference, defined as `d_x(d_x(f))`.
///
/// Away from the top two rows this is `n²(f_{j+2} - 2f_{j+1} + f_j)`; at
/// `j = n²-2` it is `-n²(f_{n²-1} - f_{n²-2})` and at `j = n²-1` it is 0.
pub fn d_xx(f: &GridFunction) -> GridFunction {
    d_x(&d_x(f))
}

/// Time-indexed family of slices, produced on demand.
///
/// Only the slices being read are held in memory; `slices()` streams them.
#[derive(Clone)]
pub struct Field {
    params: GridParams,
    horizon: usize,
    source: FieldSource,
}

#[derive(Clone)]
enum FieldSource {
    Recurrence {
        initial: GridFunction,
        rule: fn(&GridFunction) -> GridFunction,
    },
    Slices(Arc<dyn Fn(usize) -> GridFunction + Send + Sync>),
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.source {
            FieldSource::Recurrence { .. } => "recurrence",
            FieldSource::Slices(_) => "slices",
        };
        f.debug_struct("Field")
            .field("params", &self.params)
            .field("horizon", &self.horizon)
            .field("source", &kind)
            .finish()
    }
}

impl Field {
    /// Field whose slice `i+1` is `rule(slice i)`, starting from `initial`.
    pub fn recurrence(
        initial: GridFunction,
        horizon: usize,
        rule: fn(&GridFunction) -> GridFunction,
    ) -> Result<Self> {
        let params = initial.params();
        params.check_time_index(horizon)?;
        Ok(Self {
            params,
            horizon,
            source: FieldSource::Recurrence { initial, rule },
        })
    }

    /// Field given slice-by-slice. `producer(i)` must live on `params`.
    pub fn from_fn(
        params: GridParams,
        horizon: usize,
        producer: impl Fn(usize) -> GridFunction + Send + Sync + 'static,
    ) -> Result<Self> {
        params.check_time_index(horizon)?;
        Ok(Self {
            params,
            horizon,
            source: FieldSource::Slices(Arc::new(producer)),
        })
    }

    pub fn params(&self) -> GridParams {
        self.params
    }

    /// Largest time index this field can produce.
    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Slices `0..=horizon` in order.
    pub fn slices(&self) -> Box<dyn Iterator<Item = GridFunction> + '_> {
        match &self.source {
            FieldSource::Recurrence { initial, rule } => Box::new(
                std::iter::successors(Some(initial.clone()), move |s| Some(rule(s)))
                    .take(self.horizon + 1),
            ),
            FieldSource::Slices(producer) => Box::new((0..=self.horizon).map(move |i| producer(i))),
        }
    }

    pub fn slice(&self, i: usize) -> Result<GridFunction> {
        self.check_slice(i)?;
        match &self.source {
            FieldSource::Slices(producer) => Ok(producer(i)),
            FieldSource::Recurrence { .. } => Ok(self.slices().nth(i).expect("i ≤ horizon")),
        }
    }

    fn check_slice(&self, i: usize) -> Result<()> {
        if i > self.horizon {
            return Err(Error::IndexOutOfRange {
                what: "time",
                index: i as i64,
                min: 0,
                max: self.horizon as i64,
            });
        }
        Ok(())
    }
}

/// Forward difference in time: `n·(f(i+1,·) - f(i,·))`, zero at `i = n²-1`.
pub fn d_t(field: &Field, i: usize) -> Result<GridFunction> {
    let params = field.params();
    params.check_time_index(i)?;
    if i == params.time_count() - 1 {
        return Ok(GridFunction::zeros(params));
    }
    field.check_slice(i + 1)?;
    let mut it = field.slices().skip(i);
    let now = it.next().expect("slice i");
    let next = it.next().expect("slice i+1");
    Ok(&(&next - &now) * params.n() as f64)
}
