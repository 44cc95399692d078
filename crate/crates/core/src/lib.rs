//! Heat equation on `(0, ∞) × ℝ` solved through a finite-grid Fourier
//! transform with inversion constant 2.
//!
//! The grid at parameter `n` has `2n²` space points `j/n`, `-n² ≤ j ≤ n²-1`,
//! and `n²` time points `i/n`. Integrals are `1/n`-weighted sums. On that
//! grid the crate provides
//!
//! * forward-difference calculus ([`grid`]),
//! * the transform pair, spectral symbols and summation-by-parts boundary
//!   corrections ([`transform`]),
//! * the explicit stepper, the closed-form spectral recursion, discrete
//!   convolution, the windowed heat kernel and the end-to-end solver
//!   ([`evolution`]),
//! * the classical Gaussian-kernel solution and rate checks used as oracles
//!   ([`oracle`]).

// `!(x <= limit)` is used on purpose so NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod evolution;
pub mod grid;
pub mod oracle;
pub mod quadrature;
pub mod sum;
pub mod transform;

pub use error::{Error, Result};
pub use grid::{Field, GridFunction, GridParams};
pub use num_complex::Complex64;
