//! Simulation and reconstruction toolkit for reflective coded-aperture
//! snapshot spectral imaging (R-CASSI) in the near infrared.
//!
//! A scene is a [`SpectralCube`] `f(x, y, λ)`. The [`optics::SystemOperator`]
//! encodes it with a dispersion-shifted binary mask and integrates over
//! wavelength onto a 2-D [`Measurement`]. [`solvers`] recovers the cube with
//! TwIST or GAP-TV, both regularized by per-band total variation.
//!
//! Broadband acquisitions are split into two sub-bands ([`split_bands`]),
//! simulated and reconstructed independently, then joined with
//! [`stitch_cubes`].

pub mod cube;
pub mod error;
pub mod grid;
pub mod io;
pub mod metrics;
pub mod optics;
pub mod phantoms;
pub mod solvers;

pub use cube::{stitch_cubes, Measurement, SpectralCube};
pub use error::{Error, Result};
pub use grid::{make_wavelength_grid, split_bands, BandSplit, WavelengthGrid, DEFAULT_BOUNDARY_NM};
