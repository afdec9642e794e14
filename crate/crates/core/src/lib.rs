//! Relaxation dynamics of a giant atom coupled to a one-dimensional waveguide
//! at `N` equidistant points.
//!
//! The crate follows the atom from its excited state through the delayed
//! equation of motion ([`dde`]), the poles of its characteristic equation
//! ([`spectral`]), the dark states and oscillating dark-state pairs that
//! survive the dissipation ([`darkstates`]), the field trapped between the
//! coupling points ([`field`]) and the limit of infinitely many coupling
//! points ([`continuum`]).
//!
//! All quantities are dimensionless: the neighbour travel time `τ` and the
//! wave velocity `v` are both 1. See [`params`].

// Negated comparisons are used on purpose so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod characteristic;
pub mod continuum;
pub mod darkstates;
pub mod dde;
pub mod error;
pub mod field;
pub mod params;
pub mod quadrature;
pub mod spectral;

pub use characteristic::{characteristic_derivative, characteristic_fn, ComplexFreq};
pub use darkstates::{DarkPair, DarkState};
pub use dde::{integrate_beta, AmplitudeTrace};
pub use error::{Error, Result};
pub use field::FieldGrid;
pub use params::{params_from_physical, GiantAtomParams};
pub use spectral::{Pole, PoleSet};
