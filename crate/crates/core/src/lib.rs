//! Numerical laboratory for algebraic decay of the Navier–Stokes and
//! Navier–Stokes–Coriolis equations in the critical space Ḣ^{1/2}.
//!
//! The crate is organised bottom-up:
//!
//! * [`grid`], [`field`], [`spectral`]: periodic lattice, spectral vector
//!   fields, Leray projection, Riesz multipliers, Sobolev norms, dealiasing.
//! * [`propagator`]: the exact Fourier-space linear solution operator with
//!   Coriolis rotation, the Coriolis term and the pressure formula.
//! * [`profile`], [`quadrature`], [`character`]: radial spectral profiles,
//!   the continuum heat-flow oracle and decay-character estimation.
//! * [`solver`]: pseudo-spectral integrating-factor RK4 and Picard iteration.
//! * [`splitting`]: Fourier-splitting radii and ball fractions.
//! * [`fit`], [`experiment`]: power-law fitting, configs and reports.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod character;
pub mod error;
pub mod experiment;
pub mod fft;
pub mod field;
pub mod field_file;
pub mod fit;
pub mod grid;
mod modes;
pub mod profile;
pub mod propagator;
pub mod quadrature;
pub mod solver;
pub mod spectral;
pub mod splitting;

pub use error::{Error, Result};
pub use field::{Field, RealField, SpectralField};
pub use grid::Grid;
pub use propagator::RotationParams;
