//! Discrete-time quantum walks of one and two walkers scattering off a
//! spin-1/2 magnetic impurity at the origin.
//!
//! The crate is organised bottom-up:
//!
//! * [`hilbert`]: index conventions, parameters and state containers.
//! * [`operators`]: coins, impurity scattering matrices, square roots and
//!   independent Cayley-form constructions used as cross-checks.
//! * [`evolve1w`]: dense one-walker step operators, spectra and bound-state
//!   classification.
//! * [`bound_analytic`]: transfer-matrix solution of the XX bound states.
//! * [`evolve2w`]: matrix-free two-walker dynamics and observables.
//! * [`entanglement`]: impurity-traced density matrix and negativity.

// `!(x > 0.0)` is used on purpose so that NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bound_analytic;
pub mod entanglement;
pub mod error;
pub mod evolve1w;
pub mod evolve2w;
pub mod hilbert;
pub mod linalg;
pub mod operators;

pub use error::{Error, Result};
pub use hilbert::{Chirality, ModelParams, ParticleStatistics, Spin, StateVector1W, StateVector2W};

/// Double-precision complex scalar used throughout.
#[allow(non_camel_case_types)]
pub type c64 = num_complex::Complex64;
