//! Design toolkit for heralded photon-pair sources based on spontaneous
//! parametric down-conversion.
//!
//! The pipeline runs from crystal dispersion through phasematching and
//! discretized joint amplitudes to Schmidt purity, fiber-coupling overlaps
//! and a step-by-step source designer. All quantities are SI unless a name
//! says otherwise.

pub mod designer;
pub mod dispersion;
pub mod error;
pub mod export;
pub mod heralding;
pub mod joint_amplitude;
pub mod par;
pub mod phasematching;
pub mod schmidt;
pub mod toy_model;

pub use error::{Result, SpdcError};

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
