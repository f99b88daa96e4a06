//! Spontaneous emission of a two-level emitter embedded in a photonic
//! band-gap environment whose band edge is modulated periodically in time.
//!
//! Units: `c = 1`, and frequencies/times are usually quoted in units of the
//! emitter frequency `omega0` (which then equals 1).
//!
//! Module map:
//!
//! * [`crystal`] - 1D slab crystal dispersion (static and modulated), band
//!   edges and the effective-mass reduction.
//! * [`model`] - the reduced modulated band-edge model every other module
//!   consumes.
//! * [`dos`] - static and dynamical photon densities of states.
//! * [`emission`] - first-order emission spectra, the quadrature oracle,
//!   total emission probability and side-peak analysis.
//! * [`sweep`] - modulation-frequency sweeps and band-edge reconstruction
//!   from side-peak ratios.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod crystal;
pub mod dos;
pub mod emission;
pub mod error;
pub mod model;
pub mod numerics;
pub mod sweep;

pub use error::{ModelError, Result};
pub use model::EffectiveMassModel;
