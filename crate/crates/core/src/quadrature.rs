//! Globally adaptive Gauss–Kronrod (7/15) quadrature for complex integrands.

#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd-indexed Kronrod nodes (7-point rule).
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: Complex64,
    pub error_estimate: f64,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for i in 0..7 {
        let dx = half * XGK[i];
        let pair = f(center - dx) + f(center + dx);
        kronrod += pair * WGK[i];
        if i % 2 == 1 {
            gauss += pair * WG[i / 2];
        }
    }
    Panel {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).norm(),
    }
}

/// Adaptive integration of `f` over `[a, b]` to absolute tolerance `tol`.
///
/// Panels are split at the midpoint, largest error estimate first, until
/// the summed estimate falls below `tol` or `max_intervals` is reached.
pub fn integrate<F>(f: F, a: f64, b: f64, tol: f64, max_intervals: usize) -> Result<Quadrature>
where
    F: Fn(f64) -> Complex64,
{
    integrate_pieces(f, &[a, b], tol, max_intervals)
}

/// Like [`integrate`], but over consecutive pieces `[p0,p1], [p1,p2], …`.
///
/// Breakpoints at known discontinuities keep the panels from chasing a jump.
pub fn integrate_pieces<F>(f: F, points: &[f64], tol: f64, max_intervals: usize) -> Result<Quadrature>
where
    F: Fn(f64) -> Complex64,
{
    let mut heap: BinaryHeap<Panel> = points
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| gauss_kronrod(&f, w[0], w[1]))
        .collect();
    if heap.is_empty() {
        return Ok(Quadrature {
            value: Complex64::new(0.0, 0.0),
            error_estimate: 0.0,
            intervals: 0,
        });
    }
    loop {
        let error: f64 = heap.iter().map(|p| p.error).sum();
        if error <= tol || heap.len() >= max_intervals {
            let mut panels: Vec<Panel> = heap.into_vec();
            panels.sort_by(|x, y| x.a.total_cmp(&y.a));
            let value = crate::sum::sum_complex(panels.iter().map(|p| p.value));
            if error > tol {
                return Err(Error::QuadratureNotConverged {
                    tolerance: tol,
                    estimate: error,
                    intervals: panels.len(),
                });
            }
            return Ok(Quadrature {
                value,
                error_estimate: error,
                intervals: panels.len(),
            });
        }
        let worst = heap.pop().expect("non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        heap.push(gauss_kronrod(&f, worst.a, mid));
        heap.push(gauss_kronrod(&f, mid, worst.b));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn re(f: impl Fn(f64) -> f64) -> impl Fn(f64) -> Complex64 {
        move |x| Complex64::new(f(x), 0.0)
    }

    #[test]
    fn polynomial_exact() {
        let q = integrate(re(|x| x.powi(5) - 3.0 * x * x), 0.0, 2.0, 1e-12, 50).unwrap();
        assert!((q.value.re - (64.0 / 6.0 - 8.0)).abs() < 1e-13);
        assert_eq!(q.intervals, 1);
    }

    #[test]
    fn gaussian_integral() {
        let q = integrate(re(|x| (-x * x).exp()), -12.0, 12.0, 1e-13, 200).unwrap();
        assert!((q.value.re - PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn oscillatory_complex() {
        // ∫_0^π e^{ix} dx = 2i
        let q = integrate(|x| Complex64::new(0.0, x).exp(), 0.0, PI, 1e-12, 100).unwrap();
        assert!((q.value - Complex64::new(0.0, 2.0)).norm() < 1e-12);
    }

    #[test]
    fn breakpoints_handle_jump() {
        let step = re(|x| if x < 0.3 { 1.0 } else { 0.0 });
        let q = integrate_pieces(step, &[0.0, 0.3, 1.0], 1e-12, 10).unwrap();
        assert!((q.value.re - 0.3).abs() < 1e-14);
    }

    #[test]
    fn reports_non_convergence() {
        let q = integrate(re(|x| 1.0 / x.abs().sqrt()), -1.0, 1.0, 1e-14, 8);
        assert!(matches!(q, Err(Error::QuadratureNotConverged { .. })));
    }
}
