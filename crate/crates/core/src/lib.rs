//! Spin physics and signal processing for pulsed ESR of NV⁻ centers in diamond.
//!
//! The crate is organised around the observables of an X-band pulsed ESR
//! experiment on an NV⁻ ensemble:
//!
//! - [`spin`]: the S = 1 laboratory-frame spin Hamiltonian with hyperfine,
//!   quadrupole and nuclear Zeeman terms, and a Hermitian eigensolver.
//! - [`spectra`]: field-swept resonance positions, intensities and signed
//!   (polarized) amplitudes for the four NV crystal sites.
//! - [`eseem`]: two-pulse echo envelope modulation from ¹⁴N and ¹³C nuclei.
//! - [`sigproc`]: cosine FT with dead-time phase correction, peak picking and
//!   stretched-exponential decay fits.
//! - [`inference`]: orientation, coupling and fluctuator-model fitting plus
//!   bath estimates.
//!
//! All energies are frequencies in MHz, fields are in mT, ESEEM times in μs.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod eseem;
pub mod inference;
pub mod io;
pub mod lm;
pub mod sigproc;
pub mod spectra;
pub mod spin;

mod error;

pub use error::{Error, Result};
