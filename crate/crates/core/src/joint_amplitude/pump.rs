use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::dispersion::angle_from_waist;
use crate::error::{require_positive, Result};

/// Time-bandwidth product of a transform-limited Gaussian pulse (intensity
/// FWHMs), `2 ln 2 / pi ~ 0.441`.
pub const GAUSSIAN_TIME_BANDWIDTH: f64 = 2.0 * LN_2 / std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PumpRegime {
    /// Strictly monochromatic.
    Cw,
    /// Transform-limited Gaussian pulse with intensity FWHM `duration_fwhm` (s).
    Pulsed { duration_fwhm: f64 },
}

/// Pump wavelength (m), temporal regime and waist (m) at the crystal centre.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpSpec {
    pub wavelength: f64,
    pub regime: PumpRegime,
    pub waist: f64,
}

impl PumpSpec {
    pub fn new(wavelength: f64, regime: PumpRegime, waist: f64) -> Result<Self> {
        require_positive("pump wavelength", wavelength)?;
        require_positive("pump waist", waist)?;
        if let PumpRegime::Pulsed { duration_fwhm } = regime {
            require_positive("pulse duration", duration_fwhm)?;
        }
        Ok(Self {
            wavelength,
            regime,
            waist,
        })
    }

    /// Spectral intensity FWHM in Hz; `None` for a CW pump.
    pub fn spectral_fwhm(&self) -> Option<f64> {
        match self.regime {
            PumpRegime::Cw => None,
            PumpRegime::Pulsed { duration_fwhm } => Some(GAUSSIAN_TIME_BANDWIDTH / duration_fwhm),
        }
    }

    /// Full far-field divergence of the pump.
    pub fn angular_spread(&self) -> Result<f64> {
        angle_from_waist(self.wavelength, self.waist)
    }

    pub fn with_waist(mut self, waist: f64) -> Self {
        self.waist = waist;
        self
    }

    pub fn with_regime(mut self, regime: PumpRegime) -> Self {
        self.regime = regime;
        self
    }
}

/// Pump spectral *intensity* weight at a summed signal+idler detuning (Hz),
/// normalized to 1 at zero detuning: half the peak at half the FWHM. A CW
/// pump is an indicator of zero detuning.
pub fn pump_spectral_envelope(pump: &PumpSpec, nu_sum: f64) -> f64 {
    match pump.spectral_fwhm() {
        None => {
            if nu_sum == 0.0 {
                1.0
            } else {
                0.0
            }
        }
        Some(fwhm) => (-4.0 * LN_2 * (nu_sum / fwhm).powi(2)).exp(),
    }
}

/// Pump spectral field amplitude, the square root of
/// [`pump_spectral_envelope`]. This is the factor entering joint amplitudes.
pub fn pump_spectral_amplitude(pump: &PumpSpec, nu_sum: f64) -> f64 {
    match pump.spectral_fwhm() {
        None => pump_spectral_envelope(pump, nu_sum),
        Some(fwhm) => (-2.0 * LN_2 * (nu_sum / fwhm).powi(2)).exp(),
    }
}

/// Transverse pump amplitude at summed transverse wavevector `q_sum` (rad/m):
/// `exp(-q^2 w_p^2 / 4)`, the far field of a Gaussian of waist `w_p`.
pub fn pump_angular_envelope(pump: &PumpSpec, q_sum: f64) -> f64 {
    (-0.25 * (q_sum * pump.waist).powi(2)).exp()
}
