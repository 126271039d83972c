//! Phonon-induced dephasing of an electron delocalized over two quantum dots.
//!
//! The central quantity is the Markovian pure-dephasing rate γ = 1/T₂ that a
//! two-phonon (LO → LA) process imposes on a double-dot charge qubit, see
//! [`rate`]. [`harmonic`] holds the exactly solvable linear-coupling model for
//! comparison, and [`lindblad`] the resulting two-level evolution.

pub mod coupling;
pub mod error;
pub mod format;
pub mod harmonic;
pub mod lindblad;
pub mod model;
pub mod quadrature;
pub mod rate;
pub mod specfun;
pub mod sweep;

pub use error::{Error, Result};
pub use model::{DotGeometry, MaterialParams, ThermalEnv};
pub use rate::{Method, RateResult};
