//! Discretized biphoton amplitudes over wavelength and emission-angle
//! pairs, pump envelopes, and Gaussian collection filtering.
//!
//! Conventions: detunings are optical frequencies in Hz measured from the
//! centre signal and idler frequencies; transverse wavevectors `q` are in
//! rad/m and relate to external angles by `q = (2 pi / lambda) sin(theta)`.

mod build;
mod collection;
mod grid;
mod pump;

pub use build::{
    estimate_windows, intensity_correlation, joint_angular, joint_spectral, joint_spectral_collected,
    pump_samples, spectral_spatial, spectral_spatial_batch, PartnerMode, Photon, SpatialFilter, Windows,
};
pub use collection::{apply_collection, CollectionMode};
pub use grid::{Axis, GridSpec, IntensityGrid, JointAmplitude, Variable};
pub use pump::{
    pump_angular_envelope, pump_spectral_amplitude, pump_spectral_envelope, PumpRegime, PumpSpec,
    GAUSSIAN_TIME_BANDWIDTH,
};
