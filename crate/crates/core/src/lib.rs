//! Simulation and verification toolkit for random almost-periodic processes.
//!
//! A [`FourierModel`] is a finite set of frequencies with complex amplitudes,
//! the truncated Fourier data of a Besicovitch almost-periodic function. From
//! it the crate builds the stationary limit process obtained by attaching
//! independent uniform phases on the unit circle to the amplitudes (with
//! conjugate phases on `±λ` pairs), evaluates its exact covariance structure,
//! and runs Monte Carlo checks that the randomly translated function
//! `f(V + ·)` converges to that process.
//!
//! The [`zeta`] module applies the same machinery to the oscillating parts of
//! the Chebyshev, Mertens and Liouville summatory functions, driven by tables
//! of zeta-zero ordinates.

pub mod empirics;
mod error;
pub mod regression;
pub mod rng;
pub mod sampler;
pub mod series;
pub mod spectra;
pub mod sum;
pub mod tangent;
pub mod zeta;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use sampler::{PathSample, PhaseAssignment, Provenance};
pub use spectra::{FourierModel, SpectralMeasure, SpectrumDecomposition, Term, Truncation};
