//! Ground states of a self-gravitating quantum particle, with and without a
//! gamma-parametrized relativistic kinetic correction.
//!
//! The kinetic prefactor hbar^2/2m of the ordinary Schroedinger operator is
//! replaced by hbar^2/((1+gamma)m), where gamma plays the role of an effective
//! Lorentz factor determined self-consistently from the kinetic expectation
//! value of the state itself. The crate provides three layers built on that
//! idea:
//!
//! * closed forms: characteristic length scales of a gravitating mass
//!   ([`units`]), the gamma parametrization ([`gamma`]), and the
//!   particle-in-a-box spectrum ([`box_model`]);
//! * grid numerics: an s-wave radial toolbox ([`radial`]) and the
//!   self-consistent Schroedinger-Newton solver on top of it ([`sne`]);
//! * order-of-magnitude localization estimates, their minimizers, and mass
//!   scans ([`estimates`]).
//!
//! With the `parallel` feature (on by default) the embarrassingly parallel
//! entry points gain rayon-backed `par_*` twins; the plain functions are
//! always sequential, so both can be compared directly.

pub mod box_model;
pub mod error;
pub mod estimates;
pub mod gamma;
pub mod radial;
pub mod sne;
pub mod units;

pub use error::{Error, Result};
