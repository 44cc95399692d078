//! Fourier transform pair on the grid, spectral symbols and the
//! summation-by-parts boundary corrections.
//!
//! Forward: `f̂(k/n) = (1/n)·Σ_j f(j/n)·e^{-iπjk/n²}`.
//! Inverse: same weight, kernel `e^{+iπjk/n²}`.
//!
//! The kernel has period `2n²` in `jk`, so `inverse(forward(f)) = 2f` and
//! `forward(inverse(f)) = 2f` exactly. Phases are looked up in a table of
//! exact values `e^{-iπm/n²}`, `0 ≤ m < 2n²`, after integer reduction of `jk`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::grid::{d_x, GridFunction, GridParams};
use crate::sum::CompensatedSum;

/// Up to this grid parameter `forward`/`inverse` use direct summation.
pub const DIRECT_MAX_N: usize = 16;

/// Table of `e^{-iπm/n²}` for `0 ≤ m < 2n²`.
#[derive(Debug, Clone)]
pub struct PhaseTable {
    params: GridParams,
    table: Vec<Complex64>,
}

impl PhaseTable {
    pub fn new(params: GridParams) -> Self {
        let n2 = params.n_squared() as f64;
        let table = (0..params.space_count())
            .map(|m| {
                let (s, c) = (PI * m as f64 / n2).sin_cos();
                Complex64::new(c, -s)
            })
            .collect();
        Self { params, table }
    }

    pub fn params(&self) -> GridParams {
        self.params
    }

    /// `e^{-iπm/n²}` for any integer `m`.
    #[inline]
    pub fn forward(&self, m: i64) -> Complex64 {
        let period = self.table.len() as i64;
        self.table[m.rem_euclid(period) as usize]
    }

    /// `e^{+iπm/n²}` for any integer `m`.
    #[inline]
    pub fn inverse(&self, m: i64) -> Complex64 {
        self.forward(-m)
    }

    /// Forward kernel between space index `j` and frequency index `k`.
    #[inline]
    pub fn kernel(&self, j: i64, k: i64) -> Complex64 {
        // |jk| ≤ n⁴ fits in i64 for every admissible n
        self.forward(j * k)
    }
}

/// `n·(e^{iπx/n} - 1)`, evaluated without cancellation for small `x/n`.
pub fn scaled_phase_step(n: f64, x: f64) -> Complex64 {
    let theta = PI * x / n;
    let half = (0.5 * theta).sin();
    Complex64::new(-2.0 * half * half, theta.sin()) * n
}

/// Forward transform by direct compensated summation, `O(n⁴)`.
pub fn forward_direct(f: &GridFunction) -> GridFunction {
    direct(f, &PhaseTable::new(f.params()), false)
}

/// Inverse transform by direct compensated summation, `O(n⁴)`.
pub fn inverse_direct(f: &GridFunction) -> GridFunction {
    direct(f, &PhaseTable::new(f.params()), true)
}

fn direct(f: &GridFunction, phases: &PhaseTable, inverse: bool) -> GridFunction {
    let params = f.params();
    let dx = params.dx();
    GridFunction::from_index_fn(params, |k| {
        let mut acc = CompensatedSum::new();
        for (j, v) in f.iter_indexed() {
            let w = if inverse {
                phases.inverse(j * k)
            } else {
                phases.kernel(j, k)
            };
            acc.add(v * w);
        }
        acc.total() * dx
    })
}

/// Forward transform through a length-`2n²` FFT.
///
/// With `j = j' - n²`, `k = k' - n²` the kernel factors as
/// `e^{-2πij'k'/N}·(-1)^{j'}·(-1)^{k'}·(-1)^{n²}`, `N = 2n²`.
pub fn forward_fast(f: &GridFunction) -> GridFunction {
    let params = f.params();
    let len = params.space_count();
    let mut buf: Vec<Complex64> = f
        .values()
        .iter()
        .enumerate()
        .map(|(j, &v)| if j % 2 == 0 { v } else { -v })
        .collect();
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);
    let dx = params.dx();
    let parity = params.n() % 2;
    for (k, v) in buf.iter_mut().enumerate() {
        *v *= if (k + parity).is_multiple_of(2) { dx } else { -dx };
    }
    GridFunction::new(params, buf).expect("FFT preserves length")
}

/// Inverse transform through the FFT path, as `conj(forward(conj(f)))`.
pub fn inverse_fast(f: &GridFunction) -> GridFunction {
    forward_fast(&f.conj()).conj()
}

/// Forward transform; direct summation for `n ≤ DIRECT_MAX_N`, FFT above.
pub fn forward(f: &GridFunction) -> GridFunction {
    if f.params().n() <= DIRECT_MAX_N {
        forward_direct(f)
    } else {
        forward_fast(f)
    }
}

/// Inverse transform; direct summation for `n ≤ DIRECT_MAX_N`, FFT above.
pub fn inverse(f: &GridFunction) -> GridFunction {
    if f.params().n() <= DIRECT_MAX_N {
        inverse_direct(f)
    } else {
        inverse_fast(f)
    }
}

/// The multipliers of forward differencing: `ψ(x) = n(e^{iπx/n} - 1)` and
/// `φ(x) = n(e^{-iπx/n} - 1)` on the frequency grid.
#[derive(Debug, Clone)]
pub struct SpectralSymbols {
    pub psi: GridFunction,
    pub phi: GridFunction,
}

impl SpectralSymbols {
    pub fn new(params: GridParams) -> Self {
        let n = params.n() as f64;
        let psi = GridFunction::from_fn(params, |x| scaled_phase_step(n, x));
        let phi = psi.conj();
        Self { psi, phi }
    }

    pub fn params(&self) -> GridParams {
        self.psi.params()
    }
}

/// Boundary terms left over when summation by parts is applied to the
/// non-periodic forward differences, evaluated on the frequency grid.
///
/// With `f_top = f((n²-1)/n)`, `f_bot = f(-n)` and `f'_bot = d_x f(-n)`:
///
/// * `c  = f_top·e^{-iπ(n²-1)y/n} - f_bot·e^{iπny}`
/// * `d  = -(1/n)·f_bot·e^{iπy/n}·e^{iπny}`
/// * `c′ = -f'_bot·e^{iπny}`
/// * `d′ = -(1/n)·f'_bot·e^{iπy/n}·e^{iπny}`
/// * `e  = φd - c`, `e′ = φd′ - c′`
/// * `f_corr = ψφd - ψc + φd′ - c′`
///
/// so that `forward(d_x f) = ψ·f̂ - e` and `forward(d_xx f) = ψ²·f̂ - f_corr`.
#[derive(Debug, Clone)]
pub struct BoundaryCorrections {
    pub c: GridFunction,
    pub d: GridFunction,
    pub c_prime: GridFunction,
    pub d_prime: GridFunction,
    pub e: GridFunction,
    pub e_prime: GridFunction,
    pub f_corr: GridFunction,
}

impl BoundaryCorrections {
    pub fn from_slice(slice: &GridFunction) -> Self {
        let params = slice.params();
        Self::with_tables(
            slice,
            &PhaseTable::new(params),
            &SpectralSymbols::new(params),
        )
    }

    pub fn with_tables(
        slice: &GridFunction,
        phases: &PhaseTable,
        symbols: &SpectralSymbols,
    ) -> Self {
        let params = slice.params();
        let inv_n = params.dx();
        let top = params.max_index();
        let bot = params.min_index();
        let f_top = slice[top];
        let f_bot = slice[bot];
        let fx_bot = (slice[bot + 1] - f_bot) * params.n() as f64;

        let at = |k: i64| {
            let e_top = phases.kernel(top, k);
            let e_bot = phases.kernel(bot, k);
            let shift = phases.inverse(k);
            (e_top, e_bot, shift)
        };
        let c = GridFunction::from_index_fn(params, |k| {
            let (e_top, e_bot, _) = at(k);
            f_top * e_top - f_bot * e_bot
        });
        let d = GridFunction::from_index_fn(params, |k| {
            let (_, e_bot, shift) = at(k);
            -(f_bot * shift * e_bot) * inv_n
        });
        let c_prime = GridFunction::from_index_fn(params, |k| -(fx_bot * at(k).1));
        let d_prime = GridFunction::from_index_fn(params, |k| {
            let (_, e_bot, shift) = at(k);
            -(fx_bot * shift * e_bot) * inv_n
        });

        let (psi, phi) = (&symbols.psi, &symbols.phi);
        let e = &(phi * &d) - &c;
        let e_prime = &(phi * &d_prime) - &c_prime;
        let f_corr = &(&(&(&(psi * phi) * &d) - &(psi * &c)) + &(phi * &d_prime)) - &c_prime;
        Self {
            c,
            d,
            c_prime,
            d_prime,
            e,
            e_prime,
            f_corr,
        }
    }

    pub fn all(&self) -> [&GridFunction; 7] {
        [
            &self.c,
            &self.d,
            &self.c_prime,
            &self.d_prime,
            &self.e,
            &self.e_prime,
            &self.f_corr,
        ]
    }
}

/// `max_k |forward(d_x s) - (ψ·ŝ - e)|`.
pub fn check_dx_identity(slice: &GridFunction) -> f64 {
    let params = slice.params();
    let symbols = SpectralSymbols::new(params);
    let corr = BoundaryCorrections::from_slice(slice);
    let lhs = forward(&d_x(slice));
    let rhs = &(&symbols.psi * &forward(slice)) - &corr.e;
    lhs.max_abs_diff(&rhs).expect("same grid")
}

/// `max_k |forward(d_xx s) - (ψ²·ŝ - f_corr)|`.
pub fn check_dxx_identity(slice: &GridFunction) -> f64 {
    let params = slice.params();
    let symbols = SpectralSymbols::new(params);
    let corr = BoundaryCorrections::from_slice(slice);
    let lhs = forward(&crate::grid::d_xx(slice));
    let psi2 = &symbols.psi * &symbols.psi;
    let rhs = &(&psi2 * &forward(slice)) - &corr.f_corr;
    lhs.max_abs_diff(&rhs).expect("same grid")
}
