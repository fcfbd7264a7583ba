//! Reconstruction of the Wigner quasiprobability function of a harmonic
//! oscillator state directly from atomic Rabi oscillations.
//!
//! Three reconstruction paths are provided:
//!
//! * a continuous Fresnel-weighted time integral of an interpolated Rabi
//!   signal ([`fresnel`]),
//! * a discrete least-squares kernel for sparsely sampled data with full
//!   error propagation ([`discrete`]),
//! * a generalized spectral kernel for arbitrary discrete spectra
//!   ([`spectra`]).
//!
//! [`fock`] supplies the exact number-basis ground truth the other modules
//! are tested against, [`dynamics`] synthesizes the measurable signals, and
//! [`io`]/[`grid`] handle files, configuration and phase-space scans.

pub mod discrete;
pub mod dynamics;
pub mod error;
pub mod fock;
pub mod fresnel;
pub mod grid;
pub mod io;
pub mod spectra;

pub use error::{Error, Result};
pub use fock::{DisplacementAmplitude, FockDensityMatrix, NumberStatistics, WignerEstimate};
