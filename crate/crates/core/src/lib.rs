//! Lévy-driven CARMA random fields on grids.
//!
//! The crate builds convolution kernels of rational Fourier symbols
//! `q(i xi)/p(i xi)`, checks the integral conditions under which the
//! associated SPDE `p(D) s = q(D) dL` has generalized or mild solutions,
//! simulates field realizations driven by Lévy cell noise, and verifies the
//! construction statistically (characteristic functionals, spectral
//! densities, moments).
//!
//! All numerical modules are generic over the floating-point type through
//! [`num::Scalar`]; the aliases at the crate root pin the `f64` instantiation
//! the CLI and the test suites use.

pub mod error;
pub mod conditions;
pub mod fft;
pub mod field;
pub mod grid;
pub mod io;
pub mod levy;
pub mod num;
pub mod operator;
pub mod poly;
pub mod quad;
pub mod kernel;
pub mod stats;
pub mod strip;

pub use error::{Error, Result};

/// `f64` instantiations of the core types.
pub type MultiPoly64 = poly::MultiPolynomial<f64>;
pub type GridSpec64 = grid::GridSpec<f64>;
pub type GridData64 = grid::GridData<f64>;
pub type LevyTriplet64 = levy::LevyTriplet<f64>;
pub type CellNoise64 = levy::CellNoise<f64>;
pub type KernelGrid64 = kernel::KernelGrid<f64>;
pub type TestFunction64 = field::TestFunction<f64>;
pub type FieldRealization64 = field::FieldRealization<f64>;
