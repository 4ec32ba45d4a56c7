//! Spectral laboratory for two-dimensional Euler perturbations of Couette flow.
//!
//! Everything is expressed in the sheared frame `z = x - y t`, on a truncated
//! `(k, eta)` Fourier lattice. The crate is organized bottom-up:
//!
//! * [`spectral`]: lattice, fields, Gevrey norms, dyadic blocks, paraproducts, convolution.
//! * [`multiplier`]: resonant intervals, the time-dependent weight, multipliers and lemma sweeps.
//! * [`toy`]: the two-mode echo model and its growth envelopes.
//! * [`linear`]: exact linear evolution and damping measurements.
//! * [`sim`]: the pseudo-spectral nonlinear solver with energy and triad diagnostics.
//! * [`report`]: deterministic CSV/JSON emission and artifact manifests.

// `!(x > y)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod linear;
pub mod multiplier;
pub mod report;
pub mod sim;
pub mod spectral;
pub mod toy;

pub use num_complex::Complex64;
