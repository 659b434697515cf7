//! Numerics for the curvature sourced by a single scalar-field excitation
//! delocalized over two sites.
//!
//! Everything outside [`scales`] is dimensionless: momenta are measured in
//! units of the wave-packet width and lengths in units of its inverse.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the CLI and
//! thread pools live in the `cohgrav` companion crate.

#![no_std]

extern crate alloc;

pub mod curvature;
mod error;
mod fft;
pub mod qstate;
pub mod quadrature;
pub mod scales;
pub mod stress_energy;
pub mod wavepacket;

pub use error::{Error, Result};

/// A point or vector in dimensionless three-space.
pub type Vec3 = [f64; 3];

pub use num_complex::Complex64;
