//! Half-space discrepancy of half-integer dilated lattice point sets in the
//! cube `[-1, 1]^d`, and the Fourier-analytic identities behind its bound.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fourier;
pub mod geometry;
pub mod lattice;
pub mod quadrature;
pub mod scalar;

pub use error::{Error, Result};

/// Double-precision direction.
pub type Direction64 = geometry::Direction<f64>;
/// Single-precision direction.
pub type Direction32 = geometry::Direction<f32>;
pub type Cell64 = geometry::ConvexCell<f64>;
pub type Cell32 = geometry::ConvexCell<f32>;
pub type Kernel64 = fourier::SpectralKernel<f64>;
pub type Kernel32 = fourier::SpectralKernel<f32>;
