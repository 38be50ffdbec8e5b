//! Beam-space MIMO with a single RF chain: a symmetric three-port antenna
//! terminated with switchable loads radiates two mirrored instantaneous
//! patterns whose sum/difference combinations form an orthogonal basis.
//! This crate models the loaded multi-port network, builds the basis,
//! evaluates BPSK MIMO capacity over Kronecker-correlated Rayleigh fading,
//! optimizes the terminating reactances across frequency, and simulates the
//! spectral regrowth caused by pattern switching.

pub mod antenna;
pub mod capacity;
pub mod error;
pub mod grid;
pub mod linalg;
pub mod network;
pub mod optimizer;
pub mod pattern;
pub mod pattern_io;
pub mod rng;
pub mod special;
pub mod touchstone;
pub mod waveform;

pub use error::{Error, Result};

/// Free-space wave impedance, ohms.
pub const ETA0: f64 = 376.730313668;

/// Speed of light in vacuum, m/s.
pub const C0: f64 = 299_792_458.0;
