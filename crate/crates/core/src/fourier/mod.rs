//! Smoothing kernels, polytope Fourier transforms and the Poisson identity
//! for the smoothed lattice count, plus the decay and log-sum probes.
//!
//! Transforms use the convention `f̂(ξ) = ∫ f(t) e^{-2πiξ·t} dt`.

mod kernel;
mod poisson;
mod probes;
mod transform;

pub use kernel::{cos_pi, hat_phi, hat_phi_envelope, phase, phi, sin_pi, sinc_pi, SpectralKernel};
pub use poisson::{
    cell_surface, poisson_rhs, sandwich, smoothed_lattice_sum, tail_bound, truncation_for_tail, Sandwich,
    SmoothedCount, MAX_FREQUENCIES, MAX_SMOOTHED_M, MAX_TRUNCATION,
};
pub use probes::{decay_probe, logsum_probe, DecayRow, LogSumRow};
pub use transform::{hat_chi_cell, PreparedCell, FLAT_PHASE_LIMIT};
